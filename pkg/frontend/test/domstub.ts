// Minimal DOM stand-in: just enough surface for render.ts, so the suite
// runs under node:test with no browser or jsdom dependency.

export class StubElement {
  tagName: string;
  childNodes: StubElement[] = [];
  className = "";
  disabled = false;
  value = "";
  placeholder = "";
  private ownText = "";
  private listeners = new Map<string, ((ev?: { key?: string }) => void)[]>();

  constructor(tag: string) {
    this.tagName = tag.toUpperCase();
  }

  get textContent(): string {
    return this.ownText + this.childNodes.map((c) => c.textContent).join("");
  }

  set textContent(value: string | null) {
    this.childNodes = [];
    this.ownText = value ?? "";
  }

  appendChild(child: StubElement): StubElement {
    this.childNodes.push(child);
    return child;
  }

  addEventListener(type: string, handler: (ev?: { key?: string }) => void): void {
    const bucket = this.listeners.get(type) ?? [];
    bucket.push(handler);
    this.listeners.set(type, bucket);
  }

  dispatch(type: string, event?: { key?: string }): void {
    for (const handler of this.listeners.get(type) ?? []) handler(event);
  }

  click(): void {
    this.dispatch("click");
  }

  hasClass(name: string): boolean {
    return this.className.split(/\s+/).includes(name);
  }
}

export class StubDocument {
  createElement(tag: string): StubElement {
    return new StubElement(tag);
  }
}

export function findAll(root: StubElement, className: string): StubElement[] {
  const out: StubElement[] = [];
  const walk = (node: StubElement): void => {
    if (node.hasClass(className)) out.push(node);
    for (const child of node.childNodes) walk(child);
  };
  walk(root);
  return out;
}

export function findOne(root: StubElement, className: string): StubElement {
  const matches = findAll(root, className);
  if (matches.length !== 1) {
    throw new Error(`expected exactly one .${className}, found ${matches.length}`);
  }
  return matches[0];
}

export function texts(root: StubElement, className: string): string[] {
  return findAll(root, className).map((node) => node.textContent);
}
