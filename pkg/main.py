import logging
import os
import sys
from typing import Optional, Tuple

import click

import src.utils.config as config
from src.agents.factory import create_agent
from src.allocator import AdaptiveState, final_allocation, solve_exact, solve_greedy
from src.allocator.dump import load_problems, solution_to_record
from src.errors import SolverTimeout, TacError
from src.harness import load_rows, replay, report, run_experiment
from src.harness.report import ReportRow
from src.market.goods import to_dollars
from src.net import connect, serve
from src.utils.data_processing import dump_record
from src.utils.game_utils import build_agents, bulk_test_game, play_game


def _game_config(config_path: Optional[str], seed: Optional[int], ticks: Optional[int]) -> config.GameConfig:
    if config_path:
        game = config.load_game_config(config_path)
    else:
        roster = [config.AgentDescriptor(name="attac", variant="attac")] + [
            config.AgentDescriptor(name=f"low-{i}", variant="low") for i in range(1, config.AGENTS_PER_GAME)
        ]
        game = config.default_game_config(roster)
    update = {}
    if seed is not None:
        update["seed"] = seed
    if ticks is not None:
        update["ticks_per_game"] = ticks
    return game.model_copy(update=update)


@click.group()
@click.option("--log-file", default=None, help="Write logs here instead of stderr.")
@click.option("-v", "--verbose", is_flag=True, help="Log debug events.")
def cli(log_file: Optional[str], verbose: bool) -> None:
    """Trading agent competition simulator, ATTac agent and experiment harness."""
    config.load_env_variables()
    if log_file:
        os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)
    logging.basicConfig(
        filename=log_file,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(message)s",
    )


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Game config file.")
@click.option("--strategy", type=click.Path(exists=True), help="Strategy config file.")
@click.option("--seed", type=int, default=None)
@click.option("--ticks", type=int, default=None, help="Override TICKS_PER_GAME.")
@click.option("--transcript", type=click.Path(), default=None, help="Where to write the transcript.")
def play(config_path, strategy, seed, ticks, transcript) -> None:
    """Play a single seeded game and print the scores."""
    game = _game_config(config_path, seed, ticks)
    agents = build_agents(game.roster, config.load_strategy_config(strategy))
    result = play_game(game, agents, transcript)
    for name, score in sorted(result.scores.items(), key=lambda kv: -kv[1]):
        click.echo(f"{name:>12}  {to_dollars(score):>10.2f}  (utility {result.utilities[name]})")


@cli.command("bulk-test")
@click.option("--config", "config_path", type=click.Path(exists=True), help="Game config file.")
@click.option("--strategy", type=click.Path(exists=True), help="Strategy config file.")
@click.option("--seed", type=int, default=None, help="First seed.")
@click.option("--ticks", type=int, default=None, help="Override TICKS_PER_GAME.")
@click.option("--num-games", type=int, default=10)
def bulk_test(config_path, strategy, seed, ticks, num_games) -> None:
    """Play consecutive seeds with one roster and print mean scores."""
    game = _game_config(config_path, seed, ticks)
    agents = build_agents(game.roster, config.load_strategy_config(strategy))
    results = bulk_test_game(game, agents, num_games=num_games)
    click.echo("\nResults:")
    for k, v in results.items():
        click.echo(f"\n{k}: {v}")


@cli.command()
@click.argument("spec_path", type=click.Path(exists=True))
@click.option("--n-high", type=int, default=None, help="Override N_HIGH.")
@click.option("--n-games", type=int, default=None, help="Override N_GAMES.")
@click.option("--out-dir", default=None, help="Override OUT_DIR.")
@click.option("--transport", type=click.Choice(["inprocess", "wire"]), default=None)
def experiment(spec_path, n_high, n_games, out_dir, transport) -> None:
    """Run a controlled batch described by an experiment file."""
    spec = config.load_experiment_spec(spec_path)
    overrides = {"n_high": n_high, "n_games": n_games, "out_dir": out_dir, "transport": transport}
    spec = config.ExperimentSpec.model_validate({**spec.model_dump(), **{k: v for k, v in overrides.items() if v is not None}})

    def progress(i, record):
        click.echo(f"game {i + 1}/{spec.n_games} seed {record.seed}: attac {record.scores['attac']:.2f}", err=True)

    result = run_experiment(spec, progress)
    click.echo(report([ReportRow.from_result(result)], "table"), nl=False)
    for hotel_class, price in sorted(result.class_close_means().items()):
        click.echo(f"mean close {hotel_class:>9}  {price:>8.2f}")


@cli.command()
@click.argument("problems_path", type=click.Path(exists=True))
@click.option("--solver", type=click.Choice(["exact", "greedy", "final"]), default="exact")
@click.option("--budget", type=float, default=6.0, help="Simulated seconds for the exact solver.")
@click.option("--orderings", type=int, default=100, help="Greedy orderings.")
def allocate(problems_path, solver, budget, orderings) -> None:
    """Solve dumped allocation problems and print one solution line each."""
    for problem in load_problems(problems_path):
        if solver == "greedy":
            solution = solve_greedy(problem, orderings)
        elif solver == "final":
            solution = final_allocation(problem, AdaptiveState(demotion_seconds=budget, greedy_orderings=orderings))
        else:
            try:
                solution = solve_exact(problem, budget)
            except SolverTimeout as exc:
                click.echo(f"timeout: {exc}", err=True)
                solution = exc.incumbent or solve_greedy(problem, orderings)
        click.echo(dump_record(solution_to_record(solution)))


@cli.command(name="replay")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
def replay_command(paths: Tuple[str, ...]) -> None:
    """Recompute scores from transcripts and flag divergences from their footers."""
    failed = False
    for path in paths:
        try:
            outcome = replay(path)
        except TacError as exc:
            click.echo(f"{path}: {exc}", err=True)
            failed = True
            continue
        status = "ok" if outcome.ok else f"{len(outcome.divergences)} divergences"
        click.echo(f"{path}: {status}")
        for divergence in outcome.divergences:
            click.echo(f"  {divergence}")
        failed = failed or not outcome.ok
    sys.exit(1 if failed else 0)


@cli.command(name="report")
@click.argument("paths", nargs=-1, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "jsonl"]), default="table")
def report_command(paths: Tuple[str, ...], fmt: str) -> None:
    """Render results.jsonl summaries as a grid, CSV or JSON lines."""
    click.echo(report(load_rows(paths), fmt), nl=False)


@cli.command(name="serve")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True, help="Game config file.")
@click.option("--strategy", type=click.Path(exists=True), help="Strategy for in-process slots.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--games", type=int, default=1)
@click.option("--wait", type=float, default=300.0, help="Seconds to wait for remote agents.")
@click.option("--out-dir", default="results/served")
def serve_command(config_path, strategy, host, port, games, wait, out_dir) -> None:
    """Host games; roster slots with variant 'remote' wait for connections."""
    game = config.load_game_config(config_path)
    default_host, default_port = config.get_endpoint()
    strategy_config = config.load_strategy_config(strategy)
    local = {d.name: create_agent(d, strategy_config) for d in game.roster if d.variant != "remote"}
    server = serve(game, local, host or default_host, default_port if port is None else port)
    click.echo(f"listening on {server.address[0]}:{server.address[1]}", err=True)
    try:
        if not server.wait_for_agents(wait):
            click.echo("not every remote slot connected; silent agents fill the rest", err=True)
        for i in range(games):
            result = server.play(game.with_seed(game.seed + i))
            result.transcript.write(os.path.join(out_dir, f"game-{game.seed + i}.jsonl"))
            click.echo(dump_record({"seed": game.seed + i, "scores": result.scores}))
    finally:
        server.close()


@cli.command(name="connect")
@click.option("--name", required=True, help="Roster slot to claim.")
@click.option("--variant", type=click.Choice(["attac", "high", "low", "null"]), default="attac")
@click.option("--strategy", type=click.Path(exists=True))
@click.option("--state", type=click.Path(), default=None, help="ATTac predictor state file.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def connect_command(name, variant, strategy, state, host, port) -> None:
    """Play one roster slot of a remote market server."""
    agent = create_agent(
        config.AgentDescriptor(name=name, variant=variant), config.load_strategy_config(strategy), state
    )
    session = connect(name, host, port)
    for summary in session.play(agent):
        click.echo(dump_record({"seed": summary.seed, "score": summary.scores.get(name)}))


if __name__ == "__main__":
    try:
        cli()
    except TacError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
