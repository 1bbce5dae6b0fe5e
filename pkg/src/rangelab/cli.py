"""Command-line client for the service.

Every subcommand talks HTTP to a server given via --server (or the
RANGELAB_SERVER environment variable).  Without one, the commands mount the
service in-process, so the full workflow runs offline with identical
semantics.  Exit codes: 0 success, 1 usage error, 2 I/O or parse failure,
3 result-checksum mismatch between runs that must agree.
"""

import asyncio
import sys

import click
import httpx

from .errors import ChecksumMismatchError, ParseError, RangelabError
from .indexes import INDEX_KINDS

_INDEX_CHOICE = click.Choice(INDEX_KINDS)
_MODE_CHOICE = click.Choice(("learned", "binary"))
_DATASET_KIND_CHOICE = click.Choice(("uniform", "clusters"))
_WORKLOAD_KIND_CHOICE = click.Choice(("skewed", "uniform"))


class ApiClient:
    """Thin async wrapper over httpx against a URL or the in-process app."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.AsyncClient(base_url=server.rstrip("/"),
                                             timeout=None)
        else:
            from .service import create_app
            transport = httpx.ASGITransport(app=create_app())
            self._client = httpx.AsyncClient(transport=transport,
                                             base_url="http://rangelab.internal",
                                             timeout=None)

    async def __aenter__(self):
        return self

    async def __aexit__(self, *exc):
        await self._client.aclose()

    async def _check(self, resp: httpx.Response) -> httpx.Response:
        if resp.status_code < 400:
            return resp
        try:
            detail = resp.json().get("detail")
        except ValueError:
            detail = resp.text
        if resp.status_code == 409 and isinstance(detail, dict) \
                and detail.get("error") == "checksum_mismatch":
            raise ChecksumMismatchError(detail.get("message", "checksum mismatch"))
        raise ParseError(f"server rejected request ({resp.status_code}): {detail}")

    async def post_json(self, path: str, payload: dict) -> dict:
        resp = await self._client.post(path, json=payload)
        return (await self._check(resp)).json()

    async def post_bytes(self, path: str, body: bytes, params: dict) -> dict:
        resp = await self._client.post(path, content=body, params=params)
        return (await self._check(resp)).json()

    async def get_bytes(self, path: str, params: dict | None = None) -> bytes:
        resp = await self._client.get(path, params=params)
        return (await self._check(resp)).content

    async def upload_dataset(self, path: str) -> dict:
        fmt = "csv" if path.endswith(".csv") else "binary"
        with open(path, "rb") as fh:
            body = fh.read()
        return await self.post_bytes("/datasets", body, {"format": fmt})

    async def upload_workload(self, path: str) -> dict:
        with open(path, "rb") as fh:
            body = fh.read()
        return await self.post_bytes("/workloads", body, {})


def _run(server: str | None, coro_fn):
    async def runner():
        async with ApiClient(server) as client:
            return await coro_fn(client)
    return asyncio.run(runner())


def _write_out(path: str | None, text: str):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _parse_domain(text: str | None):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 4:
        raise click.BadParameter("domain must be min_lon,min_lat,max_lon,max_lat")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise click.BadParameter(f"bad domain value in {text!r}") from None
    return {"min_lon": vals[0], "min_lat": vals[1],
            "max_lon": vals[2], "max_lat": vals[3]}


def _parse_sweep(text: str | None) -> tuple[int | None, int | None]:
    if text is None:
        return None, None
    lo_s, sep, hi_s = text.partition(":")
    if not sep:
        raise click.BadParameter("sweep must be lo:hi")
    try:
        return int(lo_s), int(hi_s)
    except ValueError:
        raise click.BadParameter(f"bad sweep bounds {text!r}") from None


def _index_specs(kinds: tuple[str, ...], params: tuple[int, ...]) -> list[dict]:
    if params and len(params) not in (1, len(kinds)):
        raise click.BadParameter("--param must appear once or once per --index")
    specs = []
    for i, kind in enumerate(kinds):
        param = None
        if params:
            param = params[0] if len(params) == 1 else params[i]
        specs.append({"kind": kind, "param": param})
    return specs


class ExitMappedGroup(click.Group):
    """Group whose entry point enforces the documented exit-code contract."""

    def main(self, *args, standalone_mode=True, **kwargs):
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.exceptions.Exit as e:
            sys.exit(e.exit_code)
        except click.UsageError as e:
            e.show()
            sys.exit(1)
        except click.ClickException as e:
            e.show()
            sys.exit(1)
        except click.Abort:
            click.echo("aborted", err=True)
            sys.exit(1)
        except ChecksumMismatchError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(3)
        except (RangelabError, OSError, httpx.HTTPError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
        if standalone_mode:
            sys.exit(0)
        return rv


@click.group(cls=ExitMappedGroup)
@click.option("--server", envvar="RANGELAB_SERVER", default=None, metavar="URL",
              help="Base URL of a running service; omit to run in-process.")
@click.pass_context
def cli(ctx, server):
    """Spatial range-query benchmarking over partitioned learned indexes."""
    ctx.obj = server


@cli.command()
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Destination file.")
@click.option("--workload", "workload_kind", type=_WORKLOAD_KIND_CHOICE, default=None,
              help="Generate a query workload of this kind instead of a dataset.")
@click.option("--dataset", "dataset_path", type=click.Path(exists=False), default=None,
              help="Dataset file the workload is calibrated against.")
@click.option("--selectivity", type=float, default=1e-5, show_default=True,
              help="Target fraction of the dataset per query.")
@click.option("--count", type=int, default=1000, show_default=True,
              help="Number of queries.")
@click.option("--tolerance", type=float, default=0.1, show_default=True,
              help="Relative half-width of the accepted count band.")
@click.option("--kind", type=_DATASET_KIND_CHOICE, default="clusters",
              show_default=True, help="Dataset distribution.")
@click.option("--n", type=int, default=100000, show_default=True,
              help="Number of points.")
@click.option("--domain", default=None, metavar="X0,Y0,X1,Y1",
              help="Dataset domain box (default: whole lon/lat range).")
@click.option("--clusters", type=int, default=8, show_default=True)
@click.option("--spread", type=float, default=2.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(("csv", "binary")),
              default="binary", show_default=True, help="Dataset file format.")
@click.pass_obj
def generate(server, out, workload_kind, dataset_path, selectivity, count,
             tolerance, kind, n, domain, clusters, spread, seed, fmt):
    """Generate a dataset, or a workload calibrated against a dataset."""
    if workload_kind is not None:
        if dataset_path is None:
            raise click.UsageError("--workload needs --dataset FILE")

        async def gen_workload(client: ApiClient):
            ds = await client.upload_dataset(dataset_path)
            wl = await client.post_json("/workloads/generate", {
                "dataset_id": ds["id"], "kind": workload_kind,
                "selectivity": selectivity, "count": count,
                "seed": seed, "tolerance": tolerance,
            })
            body = await client.get_bytes(f"/workloads/{wl['id']}/export")
            with open(out, "wb") as fh:
                fh.write(body)
            return wl

        wl = _run(server, gen_workload)
        click.echo(f"wrote {wl['count']} {workload_kind} queries at "
                   f"selectivity {selectivity!r} to {out}"
                   + (f" ({wl['flagged']} flagged off-target)" if wl["flagged"] else ""))
        return

    async def gen_dataset(client: ApiClient):
        ds = await client.post_json("/datasets/generate", {
            "kind": kind, "n": n, "seed": seed,
            "domain": _parse_domain(domain),
            "clusters": clusters, "spread": spread,
        })
        body = await client.get_bytes(f"/datasets/{ds['id']}/export",
                                      {"format": fmt})
        with open(out, "wb") as fh:
            fh.write(body)
        return ds

    ds = _run(server, gen_dataset)
    click.echo(f"wrote {ds['n']} {kind} points to {out}")


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--workload", "workload_path", required=True, type=click.Path())
@click.option("--index", "index_kind", type=_INDEX_CHOICE, required=True)
@click.option("--mode", type=_MODE_CHOICE, default="binary", show_default=True)
@click.option("--sweep", default=None, metavar="LO:HI",
              help="Clip the candidate ladder to this param range.")
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--warmup", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the sweep table CSV here (default: stdout).")
@click.pass_obj
def tune(server, dataset_path, workload_path, index_kind, mode, sweep, reps,
         warmup, out):
    """Sweep an index's parameter ladder and report the fastest setting."""
    lo, hi = _parse_sweep(sweep)

    async def do_tune(client: ApiClient):
        ds = await client.upload_dataset(dataset_path)
        wl = await client.upload_workload(workload_path)
        return await client.post_json("/bench/tune", {
            "dataset_id": ds["id"], "workload_id": wl["id"], "kind": index_kind,
            "mode": mode, "lo": lo, "hi": hi, "reps": reps, "warmup": warmup,
        })

    resp = _run(server, do_tune)
    _write_out(out, resp["csv"])
    click.echo(f"best param for {index_kind} ({mode}): {resp['best_param']}",
               err=out is None)


@cli.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--workload", "workload_path", required=True, type=click.Path())
@click.option("--index", "index_kinds", type=_INDEX_CHOICE, multiple=True,
              required=True, help="Index kind; repeat for several.")
@click.option("--param", "params", type=int, multiple=True,
              help="Index parameter; one value or one per --index.")
@click.option("--mode", "modes", type=_MODE_CHOICE, multiple=True,
              default=("learned", "binary"), show_default=True)
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--warmup", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the aggregate CSV here (default: stdout).")
@click.option("--per-query", "per_query_out", type=click.Path(dir_okay=False),
              default=None, help="Also write per-query rows to this CSV.")
@click.pass_obj
def run(server, dataset_path, workload_path, index_kinds, params, modes, reps,
        warmup, out, per_query_out):
    """Measure a workload across indexes and modes; cross-check results."""
    specs = _index_specs(index_kinds, params)

    async def do_run(client: ApiClient):
        ds = await client.upload_dataset(dataset_path)
        wl = await client.upload_workload(workload_path)
        return await client.post_json("/bench/run", {
            "dataset_id": ds["id"], "workload_id": wl["id"], "indexes": specs,
            "modes": list(modes), "reps": reps, "warmup": warmup,
            "per_query": per_query_out is not None,
        })

    resp = _run(server, do_run)
    _write_out(out, resp["csv"])
    if per_query_out:
        with open(per_query_out, "w") as fh:
            fh.write(resp["per_query_csv"])


@cli.command("build-stats")
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--index", "index_kinds", type=_INDEX_CHOICE, multiple=True,
              required=True, help="Index kind; repeat for several.")
@click.option("--param", "params", type=int, multiple=True,
              help="Index parameter; one value or one per --index.")
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the build-stats CSV here (default: stdout).")
@click.pass_obj
def build_stats(server, dataset_path, index_kinds, params, reps, out):
    """Report build time and in-memory size for index configurations."""
    specs = _index_specs(index_kinds, params)

    async def do_stats(client: ApiClient):
        ds = await client.upload_dataset(dataset_path)
        return await client.post_json("/bench/build-stats", {
            "dataset_id": ds["id"], "indexes": specs, "reps": reps,
        })

    resp = _run(server, do_stats)
    _write_out(out, resp["csv"])


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


def main(argv=None):
    """Console entry point."""
    cli.main(args=argv)


if __name__ == "__main__":
    main()
