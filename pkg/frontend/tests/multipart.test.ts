import { describe, expect, it } from "vitest";

import { boundaryOf, parseMultipart, partOfType } from "../src/multipart.js";

const encoder = new TextEncoder();

function buildPreviewBody(boundary: string, png: Uint8Array, json: string): Uint8Array {
  const chunks = [
    encoder.encode(`--${boundary}\r\n`),
    encoder.encode('Content-Type: image/png\r\nContent-Disposition: inline; name="overlay"; filename="overlay.png"\r\n\r\n'),
    png,
    encoder.encode(`\r\n--${boundary}\r\n`),
    encoder.encode('Content-Type: application/json\r\nContent-Disposition: inline; name="counts"\r\n\r\n'),
    encoder.encode(json),
    encoder.encode(`\r\n--${boundary}--\r\n`),
  ];
  const total = chunks.reduce((n, c) => n + c.length, 0);
  const out = new Uint8Array(total);
  let pos = 0;
  for (const c of chunks) {
    out.set(c, pos);
    pos += c.length;
  }
  return out;
}

describe("multipart", () => {
  it("extracts the boundary from a content type", () => {
    expect(boundaryOf("multipart/mixed; boundary=leafmetric-preview")).toBe("leafmetric-preview");
    expect(boundaryOf('multipart/mixed; boundary="quoted-b"')).toBe("quoted-b");
    expect(boundaryOf("application/json")).toBeNull();
  });

  it("parses the preview payload shape byte-exactly", () => {
    // binary body with CRLF and dash bytes inside, like real PNG data
    const png = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x2d, 0x2d, 0x00, 0x0d, 0x0a]);
    const body = buildPreviewBody("leafmetric-preview", png, '{"area_px": 45000, "component_count": 1}');
    const parts = parseMultipart(body, "leafmetric-preview");
    expect(parts).toHaveLength(2);
    const imagePart = partOfType(parts, "image/png");
    const jsonPart = partOfType(parts, "application/json");
    expect(imagePart).not.toBeNull();
    expect(Array.from(imagePart!.body)).toEqual(Array.from(png));
    expect(JSON.parse(new TextDecoder().decode(jsonPart!.body))).toEqual({
      area_px: 45000,
      component_count: 1,
    });
  });

  it("returns no parts for garbage", () => {
    expect(parseMultipart(encoder.encode("not multipart at all"), "b")).toEqual([]);
  });
});
