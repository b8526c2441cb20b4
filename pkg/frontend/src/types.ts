// Mirrors the engine's HTTP schema; unknown fields are simply ignored.

export interface CandidateView {
  text: string;
  source: string;
  score: number;
  kept: boolean;
  reasons: string[];
}

export interface DebugView {
  intents: string[];
  concepts: { path: string; slot: string | null }[];
  sentiment: number;
  topic: string;
  stack: string[];
  candidates: CandidateView[];
  decision_source?: string;
  pipeline_invoked?: string[];
}

export interface TurnPayload {
  reply: string;
  source: string;
  fsm_turn: boolean;
  ended: boolean;
  debug: DebugView;
}

export interface TurnView extends TurnPayload {
  user_text: string;
}

export interface SessionStart {
  session_id: string;
  reply: string;
}
