from src.harness.experiment import ExperimentResult, GameRecord, compute_statistics, run_experiment
from src.harness.replay import ReplayReport, replay
from src.harness.report import ReportRow, load_rows, report
from src.harness.stats import OpponentStats, paired_t, summarize
