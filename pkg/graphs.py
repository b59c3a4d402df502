"""
graphs.py
=========
Profile plots for chain runs: entanglement-Hamiltonian weight per site against the
boost weight, rendered to PNG in memory.
"""

import io
from typing import Dict, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


class GraphConfig:
    """Plot colours"""
    GRAPH_COLOR = "white"
    HIGHLIGHT_COLOR = "purple"
    REFERENCE_COLOR = "orange"


class ProfileGraphs:
    """Handles all graph generation for chain runs"""
    @staticmethod
    def create_profile_graph(table: np.ndarray, title: str) -> Tuple[io.BytesIO, Dict[str, float]]:
        """table columns: site_index, h_E_weight, bw_weight, rel_dev"""
        sites, weight, bw, rel_dev = table.T

        plt.style.use("dark_background")
        plt.figure(figsize=(10, 6))
        plt.clf()

        plt.plot(sites, weight, "o", color=GraphConfig.GRAPH_COLOR, markersize=3, label="h_E diagonal")
        plt.plot(sites, bw, "-", color=GraphConfig.REFERENCE_COLOR, label="2 pi d (m^2 + 2 kappa)")

        # Highlight the largest relative deviation
        worst = int(np.argmax(np.abs(rel_dev)))
        plt.plot(sites[worst], weight[worst], "o", color=GraphConfig.HIGHLIGHT_COLOR, markersize=8)

        plt.xlabel("Site")
        plt.ylabel("Weight")
        plt.title(title)
        plt.legend()

        buf = io.BytesIO()
        plt.savefig(buf, format="png")
        buf.seek(0)
        plt.close()

        stats = {
            "worst_site": float(sites[worst]),
            "worst_rel_dev": float(rel_dev[worst]),
            "mean_abs_rel_dev": round(float(np.mean(np.abs(rel_dev))), 6),
        }
        return buf, stats
