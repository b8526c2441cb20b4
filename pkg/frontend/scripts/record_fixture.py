"""Record a scripted conversation through the live HTTP app into a JSON
fixture the web client tests replay. Run from the repo root:
    python3 frontend/scripts/record_fixture.py
"""
import json
from pathlib import Path

from fastapi.testclient import TestClient

from stackchat.service import create_app

SCRIPT = [
    "pretty good thanks",
    "lets talk about movies",
    "my favorite movie is star wars",
    "it was really great",
    "harrison ford",
    "you are very smart",
    "tell me a joke",
    "no thanks",
    "what is the meaning of life",
    "stop",
]

client = TestClient(create_app())
start = client.post("/api/sessions", json={"seed": 20240817}).json()
turns = []
for text in SCRIPT:
    payload = client.post(f"/api/sessions/{start['session_id']}/turns", json={"text": text}).json()
    turns.append({"text": text, "payload": payload})
transcript = client.get(f"/api/sessions/{start['session_id']}/transcript").text

out = Path(__file__).parent.parent / "test" / "fixtures" / "conversation.json"
out.write_text(json.dumps({"start": start, "turns": turns, "transcript": transcript}, indent=2))
print(f"wrote {out} ({len(turns)} turns)")
