import logging
import os
import tempfile

import streamlit as st

from src.harness import ReportRow, report, run_experiment
from src.market.goods import to_dollars
from src.streamlit_utils.ui_components import get_game_settings, initialize_history, setup_streamlit_page
from src.utils.config import ExperimentSpec, default_game_config, load_env_variables, load_strategy_config
from src.utils.game_utils import build_agents, play_game

# Setup logger
os.makedirs("logs", exist_ok=True)
logging.basicConfig(
    filename="logs/game_logs.log",
    level=logging.INFO,
    format="%(asctime)s - %(message)s",
)


class StreamlitMarketApp:
    """A Streamlit front end for single games and small controlled batches.

    Everything is tabular: per-agent scores, hotel closing prices and the
    grid of ATTac's mean score advantage over each opponent type.
    """

    def __init__(self):
        load_env_variables()
        setup_streamlit_page()
        initialize_history()
        self.n_high, self.seed, self.ticks, self.n_games = get_game_settings()
        self.strategy = load_strategy_config(os.getenv("TAC_STRATEGY_CONFIG"))

    def spec(self, out_dir: str) -> ExperimentSpec:
        return ExperimentSpec(
            n_high=self.n_high,
            n_games=self.n_games,
            base_seed=self.seed,
            ticks_per_game=self.ticks,
            out_dir=out_dir,
        )

    def run(self):
        single, batch = st.columns(2)
        if single.button("Play one game"):
            self.play_single()
        if batch.button(f"Run {self.n_games} games"):
            self.run_batch()

        for entry in reversed(st.session_state.history):
            st.subheader(entry["title"])
            st.table(entry["rows"])

    def play_single(self):
        game = default_game_config(self.spec("").roster(), self.seed, ticks_per_game=self.ticks)
        with st.spinner("Playing..."):
            try:
                result = play_game(game, build_agents(game.roster, self.strategy))
            except Exception as e:
                st.error(f"An error occurred: {e}")
                return
        rows = [
            {"agent": name, "score ($)": to_dollars(score), "utility ($)": result.utilities[name]}
            for name, score in sorted(result.scores.items(), key=lambda kv: -kv[1])
        ]
        st.session_state.history.append({"title": f"Game seed {self.seed}, {self.n_high} high-bidders", "rows": rows})
        closes = {str(g): to_dollars(p) for g, p in result.summary.hotel_closes.items()}
        st.session_state.history.append({"title": f"Hotel closing prices, seed {self.seed}", "rows": [closes]})

    def run_batch(self):
        with st.spinner(f"Playing {self.n_games} games..."), tempfile.TemporaryDirectory() as out_dir:
            try:
                result = run_experiment(self.spec(out_dir))
            except Exception as e:
                st.error(f"An error occurred: {e}")
                return
        st.markdown(report([ReportRow.from_result(result)], "table"))
        rows = [
            {"opponent": o, "games": s.n, "mean diff ($)": s.mean, "t": s.t, "p": s.p, "significant": s.significant}
            for o, s in result.stats.items()
        ]
        st.session_state.history.append(
            {"title": f"Batch of {self.n_games} from seed {self.seed}, {self.n_high} high-bidders", "rows": rows}
        )


# Main execution
if __name__ == "__main__":
    app = StreamlitMarketApp()
    app.run()
