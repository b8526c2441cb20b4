import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { test } from "node:test";
import { ApiClient } from "../src/api.js";
import { badgeText, conceptChip, renderApp } from "../src/render.js";
import { ChatSession } from "../src/state.js";
import { StubDocument, findAll, findOne, texts } from "./domstub.js";
const fixture = JSON.parse(readFileSync(new URL("../../test/fixtures/conversation.json", import.meta.url), "utf8"));
function deepFreeze(value) {
    if (value && typeof value === "object") {
        for (const key of Object.keys(value)) {
            deepFreeze(value[key]);
        }
        Object.freeze(value);
    }
    return value;
}
function response(body, ok = true, status = 200) {
    return { ok, status, json: async () => body, text: async () => String(body) };
}
function noopHandlers() {
    return { onStart: () => { }, onSend: (_) => { }, onRetry: () => { } };
}
async function playFixture() {
    // Frozen payloads: any client-side mutation of the debug data throws.
    const queue = [response(deepFreeze(structuredClone(fixture.start)))];
    for (const turn of fixture.turns) {
        queue.push(response(deepFreeze(structuredClone(turn.payload))));
    }
    const fetchFn = async () => {
        const next = queue.shift();
        if (!next)
            throw new Error("unscripted request");
        return next;
    };
    const session = new ChatSession(new ApiClient("", fetchFn));
    await session.start();
    for (const turn of fixture.turns) {
        await session.send(turn.text);
    }
    const doc = new StubDocument();
    const root = doc.createElement("div");
    renderApp(doc, root, session, noopHandlers());
    return { session, root, doc };
}
test("ten scripted turns render in server transcript order", async () => {
    const { root } = await playFixture();
    const transcriptTurns = fixture.transcript
        .split("\n")
        .filter((line) => line.trim())
        .map((line) => JSON.parse(line))
        .filter((record) => record.record === "turn");
    assert.equal(transcriptTurns.length, 10);
    const userBubbles = findAll(root, "user").map((el) => findOne(el, "text").textContent);
    assert.deepEqual(userBubbles, transcriptTurns.map((record) => record.user_text));
    const botBubbles = findAll(root, "bot")
        .filter((el) => !el.hasClass("opening"))
        .map((el) => findOne(el, "text").textContent);
    assert.deepEqual(botBubbles, transcriptTurns.map((record) => record.response_text));
    // opening bubble precedes everything and matches the session start
    const opening = findOne(root, "opening");
    assert.equal(findOne(opening, "text").textContent, fixture.start.reply);
});
test("source badges mirror the API payload exactly", async () => {
    const { root } = await playFixture();
    const badges = findAll(root, "bot")
        .filter((el) => !el.hasClass("opening"))
        .map((el) => findOne(el, "badge").textContent);
    const expected = fixture.turns.map((turn) => turn.payload.fsm_turn ? `FSM: ${turn.payload.source}` : turn.payload.source);
    assert.deepEqual(badges, expected);
});
test("sidebar snapshot equals the last turn's debug payload byte for byte", async () => {
    // Replay up to the turn that produced pipeline candidates.
    const queue = [response(fixture.start)];
    const upTo = fixture.turns.findIndex((t) => t.payload.debug.candidates.length > 0);
    assert.ok(upTo >= 0, "fixture must include a candidate-bearing turn");
    for (const turn of fixture.turns.slice(0, upTo + 1)) {
        queue.push(response(deepFreeze(structuredClone(turn.payload))));
    }
    const fetchFn = async () => queue.shift() ?? response({}, false, 500);
    const session = new ChatSession(new ApiClient("", fetchFn));
    await session.start();
    for (const turn of fixture.turns.slice(0, upTo + 1)) {
        await session.send(turn.text);
    }
    const doc = new StubDocument();
    const root = doc.createElement("div");
    renderApp(doc, root, session, noopHandlers());
    const debug = fixture.turns[upTo].payload.debug;
    assert.deepEqual(texts(root, "stack-item"), debug.stack);
    const topItems = findAll(root, "stack-item").filter((el) => el.hasClass("top"));
    assert.equal(topItems.length, 1);
    assert.equal(topItems[0].textContent, debug.stack[debug.stack.length - 1]);
    assert.deepEqual(texts(root, "chip"), debug.concepts.map((c) => (c.slot ? `${c.path} = ${c.slot}` : c.path)));
    assert.equal(findOne(root, "intents").textContent, debug.intents.join(", "));
    assert.equal(findOne(root, "sentiment").textContent, String(debug.sentiment));
    assert.equal(findOne(root, "topic").textContent, debug.topic);
    const rows = findAll(root, "cand");
    assert.equal(rows.length, debug.candidates.length);
    debug.candidates.forEach((candidate, i) => {
        assert.equal(findOne(rows[i], "cand-text").textContent, candidate.text);
        assert.equal(findOne(rows[i], "cand-source").textContent, candidate.source);
        assert.equal(findOne(rows[i], "cand-score").textContent, String(candidate.score));
        assert.equal(findOne(rows[i], "cand-reasons").textContent, candidate.reasons.join(", "));
        assert.equal(rows[i].hasClass("filtered"), !candidate.kept);
    });
});
test("filtered candidates are struck through with their reasons", async () => {
    const payload = {
        reply: "fallback line",
        source: "fallback",
        fsm_turn: false,
        ended: false,
        debug: {
            intents: ["CatchAllIntent"],
            concepts: [],
            sentiment: 0,
            topic: "Other",
            stack: ["base"],
            candidates: [
                { text: "way too long answer", source: "headlines", score: 1, kept: false, reasons: ["too_long"] },
                { text: "fine answer", source: "templates", score: 0.9, kept: true, reasons: [] },
            ],
        },
    };
    const queue = [response({ session_id: "s", reply: "hi" }), response(deepFreeze(payload))];
    const fetchFn = async () => queue.shift() ?? response({}, false, 500);
    const session = new ChatSession(new ApiClient("", fetchFn));
    await session.start();
    await session.send("blah");
    const doc = new StubDocument();
    const root = doc.createElement("div");
    renderApp(doc, root, session, noopHandlers());
    const rows = findAll(root, "cand");
    assert.ok(rows[0].hasClass("filtered"));
    assert.equal(findOne(rows[0], "cand-reasons").textContent, "too_long");
    assert.ok(!rows[1].hasClass("filtered"));
});
test("ended conversation disables input and shows the end marker", async () => {
    const { root, session } = await playFixture();
    assert.ok(session.ended);
    const input = findOne(root, "input");
    const send = findOne(root, "send");
    assert.equal(input.disabled, true);
    assert.equal(send.disabled, true);
    assert.equal(findOne(root, "end-marker").textContent, "conversation ended");
});
test("start button is disabled while pending and after connect", async () => {
    let release = () => { };
    const gate = new Promise((resolve) => {
        release = resolve;
    });
    const fetchFn = async () => gate;
    const session = new ChatSession(new ApiClient("", fetchFn));
    const doc = new StubDocument();
    const root = doc.createElement("div");
    const handlers = noopHandlers();
    renderApp(doc, root, session, handlers);
    assert.equal(findOne(root, "start").disabled, false);
    const startPromise = session.start();
    renderApp(doc, root, session, handlers);
    assert.equal(findOne(root, "start").disabled, true); // pending lock
    release(response({ session_id: "s", reply: "hi" }));
    await startPromise;
    renderApp(doc, root, session, handlers);
    assert.equal(findOne(root, "start").disabled, true); // already connected
});
test("connection failure shows banner and retry resends the turn", async () => {
    const queue = [
        response({ session_id: "s", reply: "hi" }),
        response({ detail: "down" }, false, 503),
        response({
            reply: "recovered",
            source: "base",
            fsm_turn: true,
            ended: false,
            debug: { intents: [], concepts: [], sentiment: 0, topic: "Phatic", stack: ["base"], candidates: [] },
        }),
    ];
    const fetchFn = async () => queue.shift() ?? response({}, false, 500);
    const session = new ChatSession(new ApiClient("", fetchFn));
    await session.start();
    await session.send("hello");
    const doc = new StubDocument();
    const root = doc.createElement("div");
    const handlers = {
        onStart: () => void session.start(),
        onSend: (text) => void session.send(text),
        onRetry: () => void session.retry(),
    };
    renderApp(doc, root, session, handlers);
    const banner = findOne(root, "banner");
    assert.ok(banner.hasClass("visible"));
    assert.ok(findOne(root, "banner-text").textContent.includes("503"));
    findOne(root, "retry").click();
    await new Promise((resolve) => setTimeout(resolve, 0));
    renderApp(doc, root, session, handlers);
    assert.equal(session.turns.length, 1);
    assert.equal(session.turns[0].reply, "recovered");
    assert.ok(!findOne(root, "banner").hasClass("visible"));
});
test("composer submits via button click and enter key", async () => {
    const sent = [];
    const queue = [response({ session_id: "s", reply: "hi" })];
    const fetchFn = async () => queue.shift() ?? response({}, false, 500);
    const session = new ChatSession(new ApiClient("", fetchFn));
    await session.start();
    const doc = new StubDocument();
    const root = doc.createElement("div");
    renderApp(doc, root, session, {
        onStart: () => { },
        onSend: (text) => sent.push(text),
        onRetry: () => { },
    });
    const input = findOne(root, "input");
    input.value = "  hello there  ";
    findOne(root, "send").click();
    input.value = "second line";
    input.dispatch("keydown", { key: "Enter" });
    input.value = "ignored";
    input.dispatch("keydown", { key: "a" });
    assert.deepEqual(sent, ["hello there", "second line"]);
});
test("badge and chip formatting helpers", () => {
    assert.equal(badgeText({ user_text: "", reply: "", source: "movie", fsm_turn: true, ended: false, debug: null }), "FSM: movie");
    assert.equal(badgeText({ user_text: "", reply: "", source: "templates", fsm_turn: false, ended: false, debug: null }), "templates");
    assert.equal(conceptChip({ path: "Gambit.gambit_slot", slot: "movies" }), "Gambit.gambit_slot = movies");
    assert.equal(conceptChip({ path: "Assent", slot: null }), "Assent");
});
