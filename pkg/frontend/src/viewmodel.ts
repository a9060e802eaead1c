/** Pure view state reducer.
 *
 * The view model holds only what arrived in server messages; applying the
 * same message sequence to a fresh model always yields an identical model,
 * which is what makes reload-and-replay safe.
 */

import type {
  PromptInfo,
  ScreenElementDict,
  ServerMessage,
  StateDigest,
} from "./protocol.js";

export interface FeedEntry {
  at: number;
  tag: string;
  text: string;
}

export interface ViewModel {
  scenario: string | null;
  digest: StateDigest | null;
  /** Announcements, most recent first. */
  feed: FeedEntry[];
  /** Session clock stamp of the last haptic, for a brief visual pulse. */
  hapticAt: number | null;
  /** Active dialog; null when no question is pending. */
  prompt: PromptInfo | null;
  elements: ScreenElementDict[];
  lastError: { code: string; text: string } | null;
}

export function emptyView(): ViewModel {
  return {
    scenario: null,
    digest: null,
    feed: [],
    hapticAt: null,
    prompt: null,
    elements: [],
    lastError: null,
  };
}

export function applyMessage(vm: ViewModel, msg: ServerMessage): ViewModel {
  switch (msg.type) {
    case "hello":
      return { ...vm, scenario: msg.scenario };
    case "error":
      return { ...vm, lastError: { code: msg.code, text: msg.text } };
    case "announcement":
      return {
        ...vm,
        feed: [{ at: msg.at, tag: msg.tag, text: msg.text }, ...vm.feed],
      };
    case "haptic":
      return { ...vm, hapticAt: msg.at };
    case "prompt":
      return {
        ...vm,
        prompt:
          msg.question === null
            ? null
            : { question: msg.question, options: msg.options },
      };
    case "elements":
      return { ...vm, elements: msg.elements };
    case "state":
      return { ...vm, digest: msg.digest };
  }
}

export function applyAll(vm: ViewModel, msgs: ServerMessage[]): ViewModel {
  let out = vm;
  for (const msg of msgs) {
    out = applyMessage(out, msg);
  }
  return out;
}
