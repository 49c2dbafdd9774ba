"""
🌙 Trajectory Formatter
Polymer paths, contact sets and interface snapshots as plot-ready files
"""

from typing import Dict, Sequence

import numpy as np
import pandas as pd

from models.gff_pinning import GffInstance
from samplers.path_sampler import Trajectory


class TrajectoryFormatter:
    """
    Formats sampled configurations

    Polymer: i,X_i (1+1) or i,X_i_1,X_i_2 (1+2), plus the contact set as a list.
    Interface: N x N height grid, 0/1 pinned mask, JSON summary.
    """

    def trajectory_frame(self, trajectory: Trajectory) -> pd.DataFrame:
        positions = np.asarray(trajectory.positions, dtype=np.int64)
        frame = pd.DataFrame({'i': np.arange(len(positions))})
        if trajectory.dimension == 1:
            frame['X_i'] = positions[:, 0]
        else:
            for axis in range(trajectory.dimension):
                frame[f'X_i_{axis + 1}'] = positions[:, axis]
        return frame

    def contact_set_payload(self, trajectory: Trajectory) -> Dict:
        return {
            'N': trajectory.n,
            'contact_set': [int(t) for t in trajectory.contact_set],
        }

    def trajectories_frame(self, trajectories: Sequence[Trajectory]) -> pd.DataFrame:
        """Several paths stacked with a leading sample column"""
        frames = []
        for index, trajectory in enumerate(trajectories):
            frame = self.trajectory_frame(trajectory)
            frame.insert(0, 'sample', index)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    def height_grid_frame(self, heights: np.ndarray) -> pd.DataFrame:
        """Rows are lattice rows 1..N, columns 1..N"""
        heights = np.asarray(heights, dtype=float)
        if heights.ndim != 2 or heights.shape[0] != heights.shape[1]:
            raise ValueError(f"Height grid must be square. Got shape {heights.shape}")
        columns = [str(j) for j in range(1, heights.shape[1] + 1)]
        return pd.DataFrame(heights, columns=columns)

    def pinned_mask_frame(self, pinned: np.ndarray) -> pd.DataFrame:
        pinned = np.asarray(pinned).astype(np.uint8)
        columns = [str(j) for j in range(1, pinned.shape[1] + 1)]
        return pd.DataFrame(pinned, columns=columns)

    def gff_summary(self, instance: GffInstance, pinned_fraction: float, stderr: float) -> Dict:
        """{N, eta, pinned_fraction, stderr}"""
        return {
            'N': instance.n,
            'eta': instance.eta,
            'pinned_fraction': float(pinned_fraction),
            'stderr': float(stderr),
        }
