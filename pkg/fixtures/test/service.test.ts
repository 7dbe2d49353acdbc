import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EXPECTED_EXPORTS, libraryPath } from "../src/build";
import { ServiceProcess } from "../src/client";

const service = new ServiceProcess();

beforeAll(async () => {
  await service.start();
  const resp = await service.request("POST", "/libraries", {
    path: libraryPath,
    name: "fixtures",
  });
  expect(resp.ok).toBe(true);
});

afterAll(() => {
  service.stop();
});

describe("fixtures through the HTTP service", () => {
  it("lists the exported symbols", async () => {
    const resp = await service.request("GET", "/libraries/fixtures/symbols");
    expect(resp.status).toBe(200);
    const body = await resp.json();
    expect([...body.symbols].sort()).toEqual(EXPECTED_EXPORTS);
  });

  it("resolves get_f via the Fortran underscore probe", async () => {
    const resp = await service.request("POST", "/resolve", {
      symbol: "get_f",
      fortran: true,
    });
    expect(resp.status).toBe(200);
    const body = await resp.json();
    expect(body.resolved_name).toBe("get_f_");
  });

  it("runs get_c end to end", async () => {
    const resp = await service.request("POST", "/calls", {
      library: "fixtures",
      symbol: "get_c",
      signature: ["double", "integer", "double"],
      args: [
        { name: "input", values: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10], elem_type: "double" },
        { name: "index", values: [9], elem_type: "integer" },
        { name: "output", values: [0], elem_type: "double" },
      ],
    });
    expect(resp.status).toBe(200);
    const body = await resp.json();
    expect(body.outputs[2].values).toEqual([9]);
    expect(body.counters.copies).toBe(3);
  });

  it("reports missing values with the argument position", async () => {
    const resp = await service.request("POST", "/calls", {
      library: "fixtures",
      symbol: "get_c",
      signature: ["double", "integer", "double"],
      args: [
        { values: ["NaN"], elem_type: "double" },
        { values: [1], elem_type: "integer" },
        { values: [0], elem_type: "double" },
      ],
    });
    expect(resp.status).toBe(422);
    const body = await resp.json();
    expect(body.kind).toBe("MissingValueError");
    expect(body.error).toContain("argument 1");
  });
});
