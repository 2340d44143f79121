/** Minimal multipart/mixed parser for the preview response
 * (one PNG part and one JSON part, boundary from the Content-Type header).
 */

export interface MultipartPart {
  contentType: string;
  body: Uint8Array;
}

export function boundaryOf(contentType: string): string | null {
  const match = /boundary="?([^";]+)"?/i.exec(contentType);
  return match ? match[1] : null;
}

function indexOfSeq(data: Uint8Array, needle: Uint8Array, from: number): number {
  outer: for (let i = from; i + needle.length <= data.length; i++) {
    for (let j = 0; j < needle.length; j++) {
      if (data[i + j] !== needle[j]) continue outer;
    }
    return i;
  }
  return -1;
}

const encoder = new TextEncoder();
const decoder = new TextDecoder();

export function parseMultipart(data: Uint8Array, boundary: string): MultipartPart[] {
  const delim = encoder.encode(`--${boundary}`);
  const parts: MultipartPart[] = [];
  let pos = indexOfSeq(data, delim, 0);
  while (pos !== -1) {
    let cursor = pos + delim.length;
    // closing delimiter is "--boundary--"
    if (data[cursor] === 0x2d && data[cursor + 1] === 0x2d) break;
    // skip the CRLF after the delimiter
    if (data[cursor] === 0x0d && data[cursor + 1] === 0x0a) cursor += 2;
    const next = indexOfSeq(data, delim, cursor);
    if (next === -1) break;
    // part body ends just before the CRLF preceding the next delimiter
    let end = next;
    if (data[end - 2] === 0x0d && data[end - 1] === 0x0a) end -= 2;
    const headerEnd = indexOfSeq(data, encoder.encode("\r\n\r\n"), cursor);
    if (headerEnd === -1 || headerEnd >= end) break;
    const headerText = decoder.decode(data.subarray(cursor, headerEnd));
    let contentType = "application/octet-stream";
    for (const line of headerText.split("\r\n")) {
      const sep = line.indexOf(":");
      if (sep !== -1 && line.slice(0, sep).trim().toLowerCase() === "content-type") {
        contentType = line.slice(sep + 1).trim();
      }
    }
    parts.push({ contentType, body: data.subarray(headerEnd + 4, end) });
    pos = next;
  }
  return parts;
}

export function partOfType(parts: MultipartPart[], prefix: string): MultipartPart | null {
  return parts.find((p) => p.contentType.toLowerCase().startsWith(prefix)) ?? null;
}
