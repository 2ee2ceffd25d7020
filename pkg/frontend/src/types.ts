// Mirrors of the JSON payloads the service emits. Field names match the
// wire format exactly; nothing here is computed client-side.

export type MarkType = "bar" | "line" | "area" | "point" | "rect" | "arc" | "text";
export type Channel = "x" | "y" | "color" | "size" | "shape" | "row" | "column" | "detail";
export type FieldType = "quantitative" | "nominal" | "ordinal" | "temporal";
export type ProvenanceKind = "manual" | "directManipulation" | "suggestion" | "quickEdit";

export interface FieldDef {
  name: string;
  type: FieldType;
}

export interface Dataset {
  name: string;
  fields: FieldDef[];
  rows: Record<string, unknown>[];
}

export interface EncodingDef {
  channel: Channel;
  field: string;
  type: FieldType;
  aggregate: "none" | "sum" | "mean" | "count";
  bin: number | null;
  scaleHints: { domain?: unknown[]; range?: unknown[] } | null;
}

export interface MarkLayer {
  markType: MarkType;
  encodings: EncodingDef[];
  style: { fill: string; opacity: number; pointOnLine: boolean; strokeWidth: number };
  tooltip: { enabled: boolean; fixedPosition: "none" | "bottom" };
}

export interface AxisDef {
  visible: boolean;
  labelVisible: boolean;
  tickCount: number;
  labelFormat: string;
  labelAngle: number;
}

export interface LegendDef {
  visible: boolean;
  position: "right" | "top" | "bottom";
}

export interface Annotation {
  id: string;
  text: string;
  anchorKey: string | null;
  anchorX: number | null;
  anchorY: number | null;
  dx: number;
  dy: number;
  width: number;
  tickLine: boolean;
  placement: "inChart" | "outOfChart";
}

export interface VisSpec {
  dataset: Dataset;
  layers: MarkLayer[];
  width: number;
  height: number;
  title: { text: string; placement: "external" | "internal" };
  axes: Partial<Record<"x" | "y", AxisDef>>;
  legends: Partial<Record<"color" | "size" | "shape", LegendDef>>;
  annotations: Annotation[];
  facet: { field: string; direction: "rows" | "columns"; maxPerRow: number } | null;
  transform: { filterField: string | null; filterTopK: number | null } | null;
  fontScale: number;
}

export interface SpecifierPath {
  role: string;
  selector: string | number | null;
}

export interface TransformRule {
  specifier: SpecifierPath;
  action: string;
  option: Record<string, unknown>;
  rationale?: string;
}

export interface EditRecord {
  id: string;
  rule: TransformRule;
  provenance: { kind: ProvenanceKind; timestamp: number };
  undone: boolean;
  propagatedFrom: string | null;
}

export interface VersionSnapshot {
  id: string;
  label: string;
  spec: VisSpec;
  suggested: boolean;
  tick: number;
}

export interface DeviceProfile {
  name: string;
  class: string;
  screenWidth: number;
  screenHeight: number;
  ppi: number;
  breakpointMin: number | null;
  breakpointMax: number | null;
}

export interface Artboard {
  id: string;
  device: DeviceProfile;
  baseSpec: VisSpec;
  spec: VisSpec;
  baseVersionId: string | null;
  currentVersionId: string | null;
  editCounter: number;
  editHistory: EditRecord[];
  versions: VersionSnapshot[];
  locked: boolean;
}

export interface RuleDescription {
  summary: string;
  rationale: string | null;
}

export interface Suggestion {
  id: string;
  entryId: string;
  level: "exploration" | "alteration";
  description: string;
  drastic: boolean;
  rules: TransformRule[];
  signature: string;
  scores: Record<string, number>;
  resultSpec: VisSpec;
  parentSuggestionId: string | null;
  descriptions?: RuleDescription[];
}

export interface Batch {
  sourceArtboardId: string;
  targetArtboardId: string;
  sourceSpec: VisSpec;
  sourceSignature: string;
  suggestions: Suggestion[];
}

export interface QuickEditOffer {
  id: string;
  entryId: string;
  description: string;
  rules: TransformRule[];
  signature: string;
}

export interface Constraints {
  elementLocks: string[];
  positionLocks: string[];
  hiddenSignatures: string[];
  served: Record<string, string[]>;
}

export interface Preferences {
  verbosity: "transformationsOnly" | "withRationales";
  sortCriterion: string;
  maxSuggestions: number;
  drasticRatio: number;
  weights: Record<string, number>;
}

export interface HistoryEntry {
  id: string;
  action: string;
  suggestion: Suggestion;
  hiddenSignatures?: string[];
  reverted?: boolean;
  [extra: string]: unknown;
}

export interface SessionState {
  id: string;
  artboards: Artboard[];
  sourceArtboardId: string;
  activeArtboardId: string | null;
  direction: "desktopFirst" | "mobileFirst" | "simultaneous";
  tick: number;
  batch: Batch | null;
  pendingQuickEdits: QuickEditOffer[];
  constraints: Constraints;
  preferences: Preferences;
  explorationHistory: HistoryEntry[];
  warnings: string[];
}

export interface EditResult {
  updatedArtboards: string[];
  artboards: Record<string, Artboard>;
  quickEdits: QuickEditOffer[];
  warnings: string[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}
