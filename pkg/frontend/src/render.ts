/** Top-down scene builder.
 *
 * Turns the latest digest into a flat list of screen-space primitives; the
 * browser entry point just paints them. Everything here is re-derived from
 * the view model on every frame, so the drawing carries no state of its
 * own.
 */

import type { PlaneDict, StateDigest } from "./protocol.js";
import type { ViewModel } from "./viewmodel.js";

export type Pt = [number, number];

export type Primitive =
  | { kind: "plane"; id: string; planeKind: string; orientation: string; poly: Pt[] }
  | { kind: "cell"; planeId: string; poly: Pt[] }
  | { kind: "object"; id: string; name: string; poly: Pt[]; selected: boolean }
  | { kind: "proposed"; x: number; y: number; fits: boolean | null }
  | { kind: "cone"; poly: Pt[] }
  | { kind: "user"; x: number; y: number; r: number; tipX: number; tipY: number };

export interface Transform {
  scale: number;
  toScreen(x: number, y: number): Pt;
}

const MARGIN_PX = 16;
const WALL_THICKNESS_M = 0.06;
const CONE_LENGTH_M = 1.2;
const CONE_HALF_ANGLE = Math.PI / 8; // matches the device's horizontal field of view
const USER_RADIUS_M = 0.18;
const HEADING_TIP_M = 0.35;

function planeCorners(plane: PlaneDict): Pt[] {
  const [cx, cy] = [plane.center[0], plane.center[1]];
  const ax = Math.cos(plane.yaw);
  const ay = Math.sin(plane.yaw);
  const [hu, hv] =
    plane.orientation === "horizontal"
      ? plane.half_extents
      : [plane.half_extents[0], WALL_THICKNESS_M / 2];
  // perp_left of the axis
  const px = -ay;
  const py = ax;
  return [
    [cx + ax * hu + px * hv, cy + ay * hu + py * hv],
    [cx - ax * hu + px * hv, cy - ay * hu + py * hv],
    [cx - ax * hu - px * hv, cy - ay * hu - py * hv],
    [cx + ax * hu - px * hv, cy + ay * hu - py * hv],
  ];
}

export function makeTransform(digest: StateDigest, width: number, height: number): Transform {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const plane of digest.world.planes) {
    for (const [x, y] of planeCorners(plane)) {
      minX = Math.min(minX, x);
      minY = Math.min(minY, y);
      maxX = Math.max(maxX, x);
      maxY = Math.max(maxY, y);
    }
  }
  if (!Number.isFinite(minX)) {
    minX = -1;
    minY = -1;
    maxX = 1;
    maxY = 1;
  }
  const spanX = Math.max(maxX - minX, 1e-6);
  const spanY = Math.max(maxY - minY, 1e-6);
  const scale = Math.min((width - 2 * MARGIN_PX) / spanX, (height - 2 * MARGIN_PX) / spanY);
  const cx = (minX + maxX) / 2;
  const cy = (minY + maxY) / 2;
  return {
    scale,
    toScreen(x: number, y: number): Pt {
      // screen y grows downward
      return [width / 2 + (x - cx) * scale, height / 2 - (y - cy) * scale];
    },
  };
}

function toScreenPoly(t: Transform, poly: Pt[]): Pt[] {
  return poly.map(([x, y]) => t.toScreen(x, y));
}

export function buildScene(vm: ViewModel, width: number, height: number): Primitive[] {
  const digest = vm.digest;
  if (digest === null) {
    return [];
  }
  const t = makeTransform(digest, width, height);
  const out: Primitive[] = [];

  const planes = [...digest.world.planes].sort((a, b) =>
    a.orientation === b.orientation ? 0 : a.orientation === "horizontal" ? -1 : 1,
  );
  for (const plane of planes) {
    out.push({
      kind: "plane",
      id: plane.id,
      planeKind: plane.kind,
      orientation: plane.orientation,
      poly: toScreenPoly(t, planeCorners(plane)),
    });
  }

  for (const [planeId, grid] of Object.entries(digest.scan.revealed)) {
    const plane = digest.world.planes.find((p) => p.id === planeId);
    if (plane === undefined || plane.orientation !== "horizontal") {
      continue; // wall coverage has no top-down footprint
    }
    const [hu, hv] = plane.half_extents;
    const du = (2 * hu) / grid.nu;
    const dv = (2 * hv) / grid.nv;
    const ax = Math.cos(plane.yaw);
    const ay = Math.sin(plane.yaw);
    const px = -ay;
    const py = ax;
    for (const [i, j] of grid.cells) {
      const u0 = -hu + i * du;
      const v0 = -hv + j * dv;
      const corner = (u: number, v: number): Pt => [
        plane.center[0] + ax * u + px * v,
        plane.center[1] + ay * u + py * v,
      ];
      out.push({
        kind: "cell",
        planeId,
        poly: toScreenPoly(t, [
          corner(u0, v0),
          corner(u0 + du, v0),
          corner(u0 + du, v0 + dv),
          corner(u0, v0 + dv),
        ]),
      });
    }
  }

  for (const obj of digest.world.objects) {
    const [cx, cy] = [obj.pose.position[0], obj.pose.position[1]];
    const fx = Math.cos(obj.pose.yaw);
    const fy = Math.sin(obj.pose.yaw);
    const sx = -fy;
    const sy = fx;
    const hd = obj.footprint.depth / 2;
    const hw = obj.footprint.width / 2;
    out.push({
      kind: "object",
      id: obj.id,
      name: obj.name,
      selected: digest.furniture.selected_id === obj.id,
      poly: toScreenPoly(t, [
        [cx + fx * hd + sx * hw, cy + fy * hd + sy * hw],
        [cx - fx * hd + sx * hw, cy - fy * hd + sy * hw],
        [cx - fx * hd - sx * hw, cy - fy * hd - sy * hw],
        [cx + fx * hd - sx * hw, cy + fy * hd - sy * hw],
      ]),
    });
  }

  if (digest.placement !== null && digest.placement.proposed_pose !== null) {
    const pos = digest.placement.proposed_pose.position;
    const [x, y] = t.toScreen(pos[0], pos[1]);
    out.push({ kind: "proposed", x, y, fits: digest.placement.fits });
  }

  const [ux, uy] = [digest.user.position[0], digest.user.position[1]];
  const yaw = digest.user.camera_yaw;
  const apex = t.toScreen(ux, uy);
  out.push({
    kind: "cone",
    poly: [
      apex,
      t.toScreen(
        ux + CONE_LENGTH_M * Math.cos(yaw - CONE_HALF_ANGLE),
        uy + CONE_LENGTH_M * Math.sin(yaw - CONE_HALF_ANGLE),
      ),
      t.toScreen(
        ux + CONE_LENGTH_M * Math.cos(yaw + CONE_HALF_ANGLE),
        uy + CONE_LENGTH_M * Math.sin(yaw + CONE_HALF_ANGLE),
      ),
    ],
  });

  const tip = t.toScreen(
    ux + HEADING_TIP_M * Math.cos(digest.user.heading_rad),
    uy + HEADING_TIP_M * Math.sin(digest.user.heading_rad),
  );
  out.push({
    kind: "user",
    x: apex[0],
    y: apex[1],
    r: USER_RADIUS_M * t.scale,
    tipX: tip[0],
    tipY: tip[1],
  });

  return out;
}
