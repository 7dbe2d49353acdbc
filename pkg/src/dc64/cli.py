"""Command-line front end.

A thin client: every command drives the HTTP service API.  With
--server it talks to a running instance; otherwise it spins up an
in-process application and sends the same requests through an ASGI
transport, so one-shot usage needs no daemon.

Argument tokens for `call`:

    name=1,2,3            inline literal (all-integer tokens make an
                          integer vector, anything else a double vector)
    name=zeros:double:8   write-only descriptor
    name=path/to/vec.dc64 vector file (DC64 format)

Exit codes: 0 ok, 1 engine error during a call, 2 usage/spec error.
"""

from __future__ import annotations

import asyncio
import json
import math
import re
from pathlib import Path

import click
import httpx

USAGE_EXIT = 2
ENGINE_EXIT = 1
_USAGE_KINDS = {"SpecError", "LoadError"}
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_INT_RE = re.compile(r"^[+-]?\d+$")
_INT32_MAX = 2**31 - 1


class CliError(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _client(server: str | None) -> httpx.AsyncClient:
    if server:
        return httpx.AsyncClient(base_url=server, timeout=600.0)
    from .service import create_app
    transport = httpx.ASGITransport(app=create_app())
    return httpx.AsyncClient(transport=transport, base_url="http://dc64.internal",
                             timeout=None)


def _raise_for_error(resp: httpx.Response) -> None:
    if resp.status_code < 400:
        return
    try:
        payload = resp.json()
        kind = payload.get("kind", "EngineError")
        message = payload.get("error") or payload.get("detail") or resp.text
    except (json.JSONDecodeError, AttributeError):
        kind, message = "EngineError", resp.text
    if isinstance(message, list):  # pydantic validation detail
        message = "; ".join(str(item.get("msg", item)) for item in message)
        kind = "SpecError"
    code = USAGE_EXIT if kind in _USAGE_KINDS else ENGINE_EXIT
    raise CliError(f"{kind}: {message}", code)


def parse_arg_token(token: str) -> dict:
    """Turn one --arg token into an ArgumentSpec payload."""
    name = None
    value = token
    if "=" in token:
        lhs, rhs = token.split("=", 1)
        if _NAME_RE.match(lhs):
            name, value = lhs, rhs
    if value.startswith("zeros:"):
        parts = value.split(":")
        if len(parts) != 3:
            raise CliError(f"bad descriptor {value!r}; expected zeros:<mode>:<len>",
                           USAGE_EXIT)
        _, mode, length = parts
        if mode not in ("double", "integer"):
            raise CliError(f"descriptor mode must be double or integer, got {mode!r}",
                           USAGE_EXIT)
        try:
            n = int(length)
        except ValueError:
            raise CliError(f"bad descriptor length {length!r}", USAGE_EXIT) from None
        return {"name": name, "zeros": {"mode": mode, "length": n}}
    if value.endswith(".dc64") or Path(value).is_file():
        return {"name": name, "path": value}
    tokens = [t.strip() for t in value.split(",") if t.strip()]
    if not tokens:
        raise CliError(f"empty literal in {token!r}", USAGE_EXIT)
    values = []
    all_int = True
    for t in tokens:
        if _INT_RE.match(t) and abs(int(t)) <= _INT32_MAX:
            values.append(int(t))
        else:
            all_int = False
            try:
                values.append(_wire_float(float(t)))
            except ValueError:
                raise CliError(f"cannot parse number {t!r} in {token!r}",
                               USAGE_EXIT) from None
    elem = "integer" if all_int else "double"
    return {"name": name, "values": values, "elem_type": elem}


def _wire_float(x: float):
    """Non-finite floats travel as strings to keep the body strict JSON."""
    if math.isnan(x):
        return "NaN"
    if x == math.inf:
        return "Infinity"
    if x == -math.inf:
        return "-Infinity"
    return x


def _fmt_value(x, elem_type: str) -> str:
    if isinstance(x, str):  # NaN/Infinity sentinels from the wire
        return x
    if elem_type == "int32":
        return str(int(x))
    if isinstance(x, float) and x.is_integer() and abs(x) < 1e15:
        return f"{x:.1f}"
    return repr(x)


def _print_call_summary(payload: dict) -> None:
    for out in payload["outputs"]:
        values = out.get("values")
        if values is None:
            shown = f"-> {out['file']}" if out.get("file") else "(not inlined)"
        else:
            head = ", ".join(_fmt_value(v, out["elem_type"]) for v in values[:8])
            more = ", ..." if len(values) > 8 else ""
            shown = f"[{head}{more}]"
        click.echo(f"{out['name']:>12}  {out['elem_type']:<7} "
                   f"length={out['length']:<10} {shown}")
    c = payload["counters"]
    click.echo(f"    counters  copies={c['copies']} casts={c['casts']} "
               f"backcasts={c['backcasts']} scans={c['scans']} "
               f"elapsed_ns={payload['elapsed_ns']}")
    for d in payload["diagnostics"]:
        where = f" (argument {d['argument']})" if d.get("argument") else ""
        click.echo(f"    [verbose {d['level']}]{where} {d['message']}", err=True)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Call compiled functions in shared libraries with declared
    signatures and intents."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.argument("lib")
@click.argument("symbol")
@click.option("--signature", "-s", required=True,
              help="Comma-separated: double, integer, int64.")
@click.option("--intent", "-i", default=None,
              help="Comma-separated: rw, r, w (default all rw).")
@click.option("--arg", "-a", "arg_tokens", multiple=True,
              help="Argument literal, descriptor, or .dc64 file.")
@click.option("--naok", is_flag=True, help="Skip the missing/infinite scan.")
@click.option("--fortran", is_flag=True, help="Resolve with the Fortran naming convention.")
@click.option("--package", default=None, help="Restrict symbol search to one registry name.")
@click.option("--out", default=None, metavar="DIR", help="Write result vectors here as .dc64.")
@click.option("--verbose", type=click.IntRange(0, 2), default=0,
              help="0 silent, 1 tuning, 2 debug diagnostics.")
@click.option("--threads", type=click.IntRange(1), default=None,
              help="Worker threads for casts/scans in this call.")
@click.pass_context
def call(ctx, lib, symbol, signature, intent, arg_tokens, naok, fortran,
         package, out, verbose, threads):
    """Invoke SYMBOL from shared library LIB."""
    args = [parse_arg_token(tok) for tok in arg_tokens]
    body = {
        "library": lib,
        "symbol": symbol,
        "signature": [s.strip() for s in signature.split(",")],
        "intents": [s.strip() for s in intent.split(",")] if intent else None,
        "naok": naok,
        "fortran": fortran,
        "verbose": verbose,
        "package": package,
        "args": args,
        "out_dir": out,
        "threads": threads,
    }

    async def run():
        async with _client(ctx.obj["server"]) as client:
            resp = await client.post("/calls", json=body)
            _raise_for_error(resp)
            return resp.json()

    payload = asyncio.run(run())
    _print_call_summary(payload)


@main.command()
@click.argument("lib")
@click.pass_context
def inspect(ctx, lib):
    """List the exported function symbols of LIB."""

    async def run():
        async with _client(ctx.obj["server"]) as client:
            resp = await client.post("/libraries", json={"path": lib})
            _raise_for_error(resp)
            name = resp.json()["name"]
            resp = await client.get(f"/libraries/{name}/symbols")
            _raise_for_error(resp)
            return resp.json()

    payload = asyncio.run(run())
    for sym in payload["symbols"]:
        click.echo(sym)


@main.command()
@click.argument("suite", type=click.Choice(["overhead", "large", "write", "scaling"]))
@click.option("--lib", required=True, help="Library providing the BENCHMARK symbol.")
@click.option("--length", type=int, default=None, help="Vector length (suite-dependent default).")
@click.option("--replicates", type=int, default=None)
@click.option("--threads", default=None, metavar="LIST",
              help="Comma-separated thread counts (scaling) or a single count.")
@click.option("--csv", "csv_path", default=None, metavar="PATH",
              help="Write rows here; default stdout.")
@click.pass_context
def bench(ctx, suite, lib, length, replicates, threads, csv_path):
    """Run a timing suite and emit one CSV row per replicate."""
    thread_list = None
    if threads:
        try:
            thread_list = [int(t) for t in threads.split(",") if t.strip()]
        except ValueError:
            raise CliError(f"bad thread list {threads!r}", USAGE_EXIT) from None
    body = {"suite": suite, "library": lib, "length": length,
            "replicates": replicates, "threads": thread_list}

    async def run():
        async with _client(ctx.obj["server"]) as client:
            resp = await client.post("/bench", json=body)
            _raise_for_error(resp)
            return resp.text

    text = asyncio.run(run())
    if csv_path:
        Path(csv_path).write_text(text)
        click.echo(f"wrote {text.count(chr(10)) - 1} rows to {csv_path}", err=True)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("count", type=click.IntRange(1), required=False)
@click.pass_context
def threads(ctx, count):
    """Show or set the worker thread count."""

    async def run():
        async with _client(ctx.obj["server"]) as client:
            if count is None:
                resp = await client.get("/threads")
            else:
                resp = await client.put("/threads", json={"threads": count})
            _raise_for_error(resp)
            return resp.json()

    click.echo(asyncio.run(run())["threads"])


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8864)
@click.option("--long-threshold", type=int, default=None,
              help="Lengths above this use the long-vector header (default 2^31-1).")
def serve(host, port, long_threshold):
    """Run the call service."""
    import uvicorn

    from .service import create_app
    from .vectors import DEFAULT_LONG_THRESHOLD

    app = create_app(long_threshold=long_threshold or DEFAULT_LONG_THRESHOLD)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
