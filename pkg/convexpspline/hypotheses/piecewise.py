"""
    @file:              piecewise.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the PiecewisePolyFn class, an exact representation of continuous piecewise
                        polynomial functions of degree at most 2 on [0, 1]. It holds the hypothesis functions, their
                        derivatives and the fitted linear splines.
"""

from typing import Iterator, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from convexpspline.utils.exceptions import InvalidArgumentError


class Piece(NamedTuple):
    start: float
    end: float
    a: float
    b: float
    c: float


class SupNorm(NamedTuple):
    value: float
    location: float


class PiecewisePolyFn:
    """
    Piecewise polynomial p(x) = a_j t^2 + b_j t + c_j with t = x - x_j on [x_j, x_{j+1}). The local coordinate keeps
    the coefficients of short pieces far from x = 0 well conditioned.
    """

    def __init__(
            self,
            breakpoints: Sequence[float],
            coefficients: Union[Sequence[Sequence[float]], np.ndarray]
    ):
        """
        Parameters
        ----------
        breakpoints : Sequence[float]
            Strictly increasing x_0 < ... < x_P.
        coefficients : Union[Sequence[Sequence[float]], np.ndarray]
            (P, 3) local coefficients (a_j, b_j, c_j).
        """
        breakpoints = np.asarray(breakpoints, dtype=float)
        coefficients = np.asarray(coefficients, dtype=float).reshape(-1, 3)

        if breakpoints.ndim != 1 or breakpoints.size < 2:
            raise InvalidArgumentError("A piecewise polynomial needs at least two breakpoints.")
        if np.any(np.diff(breakpoints) <= 0.0):
            raise InvalidArgumentError("Breakpoints must be strictly increasing.")
        if coefficients.shape[0] != breakpoints.size - 1:
            raise InvalidArgumentError(
                f"Expected {breakpoints.size - 1} rows of coefficients, got {coefficients.shape[0]}."
            )

        breakpoints.setflags(write=False)
        coefficients.setflags(write=False)
        self._breakpoints = breakpoints
        self._coefficients = coefficients

    @property
    def breakpoints(self) -> np.ndarray:
        return self._breakpoints

    @property
    def coefficients(self) -> np.ndarray:
        return self._coefficients

    @property
    def degree(self) -> int:
        if np.any(self._coefficients[:, 0] != 0.0):
            return 2
        if np.any(self._coefficients[:, 1] != 0.0):
            return 1

        return 0

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self._breakpoints)

    def __len__(self) -> int:
        return self._coefficients.shape[0]

    def __iter__(self) -> Iterator[Piece]:
        for start, end, (a, b, c) in zip(self._breakpoints[:-1], self._breakpoints[1:], self._coefficients):
            yield Piece(float(start), float(end), float(a), float(b), float(c))

    def __repr__(self) -> str:
        return f"PiecewisePolyFn(pieces={len(self)}, degree={self.degree}, domain=[{self.domain[0]}, {self.domain[1]}])"

    @property
    def domain(self) -> Tuple[float, float]:
        return float(self._breakpoints[0]), float(self._breakpoints[-1])

    @classmethod
    def linear_interpolant(cls, nodes: Sequence[float], values: Sequence[float]) -> "PiecewisePolyFn":
        """
        Continuous piecewise linear function through (nodes[k], values[k]).
        """
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        slopes = np.diff(values) / np.diff(nodes)

        return cls(nodes, np.column_stack((np.zeros_like(slopes), slopes, values[:-1])))

    def _locate(self, x: np.ndarray) -> np.ndarray:
        index = np.searchsorted(self._breakpoints, x, side="right") - 1

        return np.clip(index, 0, len(self) - 1)

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        points = np.asarray(x, dtype=float)
        index = self._locate(points)
        t = points - self._breakpoints[index]
        a, b, c = self._coefficients[index].T if points.ndim else self._coefficients[index]
        value = (a * t + b) * t + c

        return float(value) if np.ndim(value) == 0 else value

    def end_values(self) -> np.ndarray:
        """
        Left limits at x_1, ..., x_P.
        """
        h = self.widths
        a, b, c = self._coefficients.T

        return (a * h + b) * h + c

    def derivative(self) -> "PiecewisePolyFn":
        a, b, _ = self._coefficients.T

        return PiecewisePolyFn(self._breakpoints, np.column_stack((np.zeros_like(a), 2.0 * a, b)))

    def antiderivative(self, start_value: float = 0.0) -> "PiecewisePolyFn":
        """
        Exact antiderivative F with F(x_0) = start_value. Only defined for piecewise linear functions, so that the
        result stays of degree at most 2.
        """
        if self.degree > 1:
            raise InvalidArgumentError("Only piecewise linear functions can be integrated into degree 2 pieces.")

        h = self.widths
        _, b, c = self._coefficients.T
        increments = 0.5 * b * h ** 2 + c * h
        constants = start_value + np.concatenate(([0.0], np.cumsum(increments)[:-1]))

        return PiecewisePolyFn(self._breakpoints, np.column_stack((0.5 * b, c, constants)))

    def refine(self, breakpoints: Sequence[float]) -> "PiecewisePolyFn":
        """
        Same function on a finer set of breakpoints, which must contain the current ones and share the domain.
        """
        breakpoints = np.asarray(breakpoints, dtype=float)
        starts = breakpoints[:-1]
        index = self._locate(starts)
        shift = starts - self._breakpoints[index]
        a, b, c = self._coefficients[index].T

        return PiecewisePolyFn(breakpoints, np.column_stack((a, 2.0 * a * shift + b, (a * shift + b) * shift + c)))

    def _merged_breakpoints(self, other: "PiecewisePolyFn") -> np.ndarray:
        if not np.allclose(self.domain, other.domain, rtol=0.0, atol=1e-14):
            raise InvalidArgumentError(f"Domains {self.domain} and {other.domain} differ.")

        merged = np.union1d(self._breakpoints, other._breakpoints)
        keep = np.concatenate(([True], np.diff(merged) > 1e-14 * max(1.0, abs(merged[-1]))))
        merged = merged[keep]
        merged[-1] = max(self.domain[1], other.domain[1])

        return merged

    def __sub__(self, other: "PiecewisePolyFn") -> "PiecewisePolyFn":
        merged = self._merged_breakpoints(other)

        return PiecewisePolyFn(merged, self.refine(merged).coefficients - other.refine(merged).coefficients)

    def __add__(self, other: "PiecewisePolyFn") -> "PiecewisePolyFn":
        merged = self._merged_breakpoints(other)

        return PiecewisePolyFn(merged, self.refine(merged).coefficients + other.refine(merged).coefficients)

    def sup_norm(self, start: Optional[float] = None, end: Optional[float] = None) -> SupNorm:
        """
        Exact max |p(x)| over the domain, from the values at both ends of each piece and at the interior vertex of
        each quadratic piece. With start and end, only the pieces inside [start, end] are visited.
        """
        lower = self._breakpoints[0] if start is None else start
        upper = self._breakpoints[-1] if end is None else end
        slack = 1e-12 * max(1.0, abs(upper - lower))

        best = SupNorm(-1.0, float(lower))
        for piece in self:
            if piece.start < lower - slack or piece.end > upper + slack:
                continue
            width = piece.end - piece.start
            candidates = [0.0, width]
            if piece.a != 0.0:
                vertex = -piece.b / (2.0 * piece.a)
                if 0.0 < vertex < width:
                    candidates.append(vertex)
            for t in candidates:
                value = abs((piece.a * t + piece.b) * t + piece.c)
                if value > best.value:
                    best = SupNorm(value, piece.start + t)

        return best

    def continuity_gap(self) -> float:
        """
        Largest jump at the interior breakpoints.
        """
        if len(self) == 1:
            return 0.0

        return float(np.max(np.abs(self.end_values()[:-1] - self._coefficients[1:, 2])))

    def is_continuous(self, tol: float = 1e-12) -> bool:
        return self.continuity_gap() <= tol
