# quotatope/infrastructure/svg_plot.py

from pathlib import Path
from typing import Optional

from quotatope.infrastructure.interfaces import Dataset, PlotterInterface
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)


class MatplotlibSvgPlotter(PlotterInterface):
    """Scatter plots rendered to SVG with the non-interactive Agg backend."""

    def __init__(self, marker_size: float = 4.0):
        self.marker_size = marker_size

    def scatter(self, dataset: Dataset, x: str, y: str, path: Path, group: Optional[str] = None) -> Path:
        # imported here so that plotting stays optional
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        matplotlib.rcParams["svg.hashsalt"] = dataset.name
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        fig, ax = plt.subplots(figsize=(8, 5))
        try:
            xs, ys = dataset.column(x), dataset.column(y)
            if group is None:
                ax.scatter(_floats(xs), _floats(ys), s=self.marker_size)
            else:
                labels = dataset.column(group)
                for label in sorted(set(labels), key=str):
                    picked = [k for k, v in enumerate(labels) if v == label]
                    ax.scatter(
                        _floats(xs[k] for k in picked),
                        _floats(ys[k] for k in picked),
                        s=self.marker_size,
                        label=f"{group}={label}",
                    )
                ax.legend(fontsize="small", ncol=2)
            ax.set_xlabel(x)
            ax.set_ylabel(y)
            ax.set_title(dataset.name)
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
        logger.info(f"Plotted {y} against {x} to {path}")
        return path


def _floats(values):
    return [float(v) if v is not None and v != "" else float("nan") for v in values]


def create_plotter(plotter_type: str = "svg") -> PlotterInterface:
    plotters = {
        "svg": MatplotlibSvgPlotter
    }
    if plotter_type not in plotters:
        raise ValueError(f"Unsupported plotter type: {plotter_type}")
    return plotters[plotter_type]()
