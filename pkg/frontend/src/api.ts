/** Typed client for the annotation service JSON API. */

import type { Run } from "./rle.js";

export interface ExamInfo {
  exam_id: string;
  dims: [number, number, number];
  spacing: [number, number, number];
  slices: number;
  has_gt: boolean;
  window: { min: number; max: number };
  total_strokes: number;
}

export interface StrokeIn {
  label: number;
  slice_z: number;
  points: [number, number][];
  brush_radius: number;
  elapsed_ms: number;
}

export interface SessionState {
  exam_id: string;
  total_strokes: number;
  strokes_per_slice: Record<string, number>;
  per_slice_time: Record<string, number>;
  session?: {
    strokes: StrokeIn[];
    per_slice_time: Record<string, number>;
  };
}

export interface SegmentRequest {
  algorithm: "bgrowth3d" | "bgrowth2d" | "growcut";
  max_iters?: number;
  slice_distance?: number;
}

export interface Metrics {
  dsc: number;
  jac: number;
  hd: number;
  elapsed_segmentation: number;
  annotation_seconds: number;
}

export interface SegmentResponse {
  result_id: string;
  iterations: number;
  converged: boolean;
  elapsed_s: number;
  metrics?: Metrics;
}

export interface MaskResponse {
  z: number;
  dims: [number, number];
  result_id: string;
  runs: Run[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class AnnotatorApi {
  constructor(readonly baseUrl: string = "") {}

  listExams(): Promise<ExamInfo[]> {
    return request(`${this.baseUrl}/exams`);
  }

  /** URL of the windowed grayscale PNG for one slice. */
  sliceUrl(examId: string, z: number): string {
    return `${this.baseUrl}/exams/${encodeURIComponent(examId)}/slice/${z}`;
  }

  getStrokes(examId: string): Promise<SessionState> {
    return request(`${this.baseUrl}/exams/${encodeURIComponent(examId)}/strokes`);
  }

  postStroke(examId: string, stroke: StrokeIn): Promise<SessionState> {
    return request(`${this.baseUrl}/exams/${encodeURIComponent(examId)}/strokes`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(stroke),
    });
  }

  undoStroke(examId: string): Promise<SessionState> {
    return request(
      `${this.baseUrl}/exams/${encodeURIComponent(examId)}/strokes/last`,
      { method: "DELETE" },
    );
  }

  segment(examId: string, req: SegmentRequest): Promise<SegmentResponse> {
    return request(`${this.baseUrl}/exams/${encodeURIComponent(examId)}/segment`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  getMask(examId: string, z: number): Promise<MaskResponse> {
    return request(`${this.baseUrl}/exams/${encodeURIComponent(examId)}/mask/${z}`);
  }
}
