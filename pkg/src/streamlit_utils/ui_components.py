import streamlit as st

from src.utils.config import AGENTS_PER_GAME


def setup_streamlit_page():
    """Configure Streamlit's page settings."""
    if "sbstate" not in st.session_state:
        st.session_state.sbstate = "expanded"

    st.set_page_config(
        page_title="TAC Travel Market",
        page_icon="✈️",
        layout="wide",
        initial_sidebar_state=st.session_state.sbstate,
    )
    st.title("✈️ TAC travel market: ATTac vs. high and low bidders")
    st.divider()


def initialize_history():
    """Initialize the list of finished games in the session state if not already present."""
    if "history" not in st.session_state:
        st.session_state.history = []


def restart():
    """Forget every game played in this session."""
    st.session_state.history = []


def get_game_settings():
    """Read the batch settings from the sidebar: (n_high, seed, ticks, n_games)."""
    with st.sidebar:
        n_high = st.slider(
            "High-bidders in the game",
            min_value=0,
            max_value=AGENTS_PER_GAME - 1,
            value=3,
            help="The remaining opponents are low-bidders",
        )
        seed = st.number_input("Seed", min_value=0, value=0, step=1)
        ticks = st.slider(
            "Ticks per game",
            min_value=12,
            max_value=180,
            value=60,
            step=12,
            help="Each tick models five seconds of the 15-minute game",
        )
        n_games = st.number_input("Games per batch", min_value=1, max_value=50, value=5, step=1)
        st.button("Clear history", on_click=restart)
    return int(n_high), int(seed), int(ticks), int(n_games)
