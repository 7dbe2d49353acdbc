/* DC64 vector file format: magic "DC64", version u8 = 1, element-type
 * tag u8 (0 = double, 1 = int32), length u64 LE, raw little-endian
 * element data.  Header is exactly 14 bytes, no padding. */

import { readFileSync, writeFileSync } from "node:fs";

const MAGIC = "DC64";
const VERSION = 1;
const HEADER_BYTES = 14;

export type ElemType = "double" | "int32";

const TAGS: Record<ElemType, number> = { double: 0, int32: 1 };
const ITEM_BYTES: Record<ElemType, number> = { double: 8, int32: 4 };

export interface Dc64Vector {
  elemType: ElemType;
  values: number[];
}

export function writeVector(path: string, elemType: ElemType, values: ArrayLike<number>): void {
  const n = values.length;
  const buf = Buffer.alloc(HEADER_BYTES + n * ITEM_BYTES[elemType]);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt8(VERSION, 4);
  buf.writeUInt8(TAGS[elemType], 5);
  buf.writeBigUInt64LE(BigInt(n), 6);
  for (let i = 0; i < n; i++) {
    if (elemType === "double") {
      buf.writeDoubleLE(values[i], HEADER_BYTES + 8 * i);
    } else {
      buf.writeInt32LE(values[i], HEADER_BYTES + 4 * i);
    }
  }
  writeFileSync(path, buf);
}

export function readVector(path: string): Dc64Vector {
  const buf = readFileSync(path);
  if (buf.length < HEADER_BYTES || buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`${path}: not a DC64 vector file`);
  }
  if (buf.readUInt8(4) !== VERSION) {
    throw new Error(`${path}: unsupported version ${buf.readUInt8(4)}`);
  }
  const tag = buf.readUInt8(5);
  const elemType = (Object.keys(TAGS) as ElemType[]).find((k) => TAGS[k] === tag);
  if (elemType === undefined) {
    throw new Error(`${path}: unknown element-type tag ${tag}`);
  }
  const length = Number(buf.readBigUInt64LE(6));
  const expected = HEADER_BYTES + length * ITEM_BYTES[elemType];
  if (buf.length !== expected) {
    throw new Error(`${path}: size ${buf.length} != expected ${expected}`);
  }
  const values: number[] = new Array(length);
  for (let i = 0; i < length; i++) {
    values[i] =
      elemType === "double"
        ? buf.readDoubleLE(HEADER_BYTES + 8 * i)
        : buf.readInt32LE(HEADER_BYTES + 4 * i);
  }
  return { elemType, values };
}
