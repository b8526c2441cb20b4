// Mirrors the engine's HTTP schema; unknown fields are simply ignored.
export {};
