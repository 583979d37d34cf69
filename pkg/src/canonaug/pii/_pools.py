"""Replacement pools: category-typed value lists used to fill and replace slots."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from loguru import logger

from ..exceptions import ExhaustedPoolError, MissingCategoryError
from ..utils import QUOTE, Tokens, as_tokens

POOL_SUFFIX = ".txt"
GROUPS_SUFFIX = ".groups"
BALANCED_CATEGORY = "name"


def _dedupe(values: Iterable[Tokens]) -> tuple[Tokens, ...]:
    return tuple(dict.fromkeys(values))


@dataclass(frozen=True, slots=True)
class ReplacementPools:
    """Values available for each slot category.

    Attributes
    ----------
    pools : Mapping[str, tuple[Tokens, ...]]
        Non-empty value lists per category, in file order.
    balance_groups : Mapping[str, tuple[Tokens, ...]] | None
        Optional partition of the ``name`` pool into demographic groups. When
        present, name draws pick a group uniformly and then a member uniformly.
    """

    pools: Mapping[str, tuple[Tokens, ...]]
    balance_groups: Mapping[str, tuple[Tokens, ...]] | None = None
    balanced_category: str = field(default=BALANCED_CATEGORY)

    def __post_init__(self) -> None:
        """Validate pool contents and the group partition."""
        for category, values in self.pools.items():
            if not values:
                raise ValueError(f"Pool {category!r} is empty")
            for value in values:
                if not value or QUOTE in value:
                    raise ValueError(f"Pool {category!r} holds an invalid value {value!r}")
        if self.balance_groups is None:
            return
        members = [value for group in self.balance_groups.values() for value in group]
        if len(members) != len(set(members)):
            raise ValueError("Balance groups must be disjoint")
        if set(members) != set(self.pools.get(self.balanced_category, ())):
            raise ValueError(f"Balance groups must cover the {self.balanced_category!r} pool exactly")
        if any(not group for group in self.balance_groups.values()):
            raise ValueError("Balance groups must be non-empty")

    @classmethod
    def from_mapping(
        cls,
        pools: Mapping[str, Iterable[str | Iterable[str]]],
        *,
        balance_groups: Mapping[str, Iterable[str | Iterable[str]]] | None = None,
    ) -> ReplacementPools:
        """Build pools from raw strings or token sequences.

        Examples
        --------
        >>> pools = ReplacementPools.from_mapping({"name": ["kai", "mei"]})
        >>> pools.values("name")
        (('kai',), ('mei',))
        """
        normalized = {
            category: _dedupe(as_tokens(v) if isinstance(v, str) else tuple(v) for v in values)
            for category, values in pools.items()
        }
        groups = None
        if balance_groups is not None:
            groups = {
                label: _dedupe(as_tokens(v) if isinstance(v, str) else tuple(v) for v in values)
                for label, values in balance_groups.items()
            }
        return cls(pools=normalized, balance_groups=groups)

    @classmethod
    def from_directory(cls, folder: Path | str) -> ReplacementPools:
        """Load ``<category>.txt`` files and an optional ``name.groups`` file.

        The groups file has one ``<first>-<last> <label>`` line per group, with
        1-based inclusive line numbers into ``name.txt``.
        """
        folder = Path(folder)
        pools: dict[str, tuple[Tokens, ...]] = {}
        for fpath in sorted(folder.glob(f"*{POOL_SUFFIX}")):
            lines = [line.strip() for line in fpath.read_text(encoding="utf-8").splitlines()]
            pools[fpath.stem] = _dedupe(as_tokens(line) for line in lines if line)
        if not pools:
            raise FileNotFoundError(f"No pool files found in {folder}")

        groups_path = folder / f"{BALANCED_CATEGORY}{GROUPS_SUFFIX}"
        groups: dict[str, tuple[Tokens, ...]] | None = None
        if groups_path.exists():
            name_lines = [
                as_tokens(line.strip())
                for line in (folder / f"{BALANCED_CATEGORY}{POOL_SUFFIX}").read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
            groups = {}
            for raw in groups_path.read_text(encoding="utf-8").splitlines():
                if not raw.strip():
                    continue
                span, label = raw.split(maxsplit=1)
                first, last = (int(bound) for bound in span.split("-"))
                groups[label.strip()] = _dedupe(name_lines[first - 1 : last])
        logger.debug("Loaded pools from {}: {}", folder, {k: len(v) for k, v in pools.items()})
        return cls(pools=pools, balance_groups=groups)

    def to_directory(self, folder: Path | str) -> Path:
        """Write pools in the directory format read by :meth:`from_directory`."""
        folder = Path(folder)
        folder.mkdir(parents=True, exist_ok=True)
        for category in sorted(self.pools):
            values = self.pools[category]
            if category == self.balanced_category and self.balance_groups:
                values = tuple(v for group in self.balance_groups.values() for v in group)
            text = "\n".join(" ".join(value) for value in values) + "\n"
            (folder / f"{category}{POOL_SUFFIX}").write_text(text, encoding="utf-8")
        if self.balance_groups:
            lines, first = [], 1
            for label, group in self.balance_groups.items():
                lines.append(f"{first}-{first + len(group) - 1} {label}")
                first += len(group)
            (folder / f"{self.balanced_category}{GROUPS_SUFFIX}").write_text("\n".join(lines) + "\n")
        return folder

    @property
    def categories(self) -> frozenset[str]:
        """Categories with a pool."""
        return frozenset(self.pools)

    def values(self, category: str) -> tuple[Tokens, ...]:
        """Return the values of a category.

        Raises
        ------
        MissingCategoryError
            If the category has no pool.
        """
        try:
            return self.pools[category]
        except KeyError:
            raise MissingCategoryError(f"No replacement pool for category {category!r}") from None

    def require(self, categories: Iterable[str]) -> None:
        """Raise :class:`MissingCategoryError` unless every category has a pool."""
        missing = sorted(set(categories) - set(self.pools))
        if missing:
            raise MissingCategoryError(f"No replacement pool for categories {missing}")

    def all_values(self) -> frozenset[Tokens]:
        """Every value across every pool."""
        return frozenset(value for values in self.pools.values() for value in values)

    def draw(self, category: str, rng: np.random.Generator, *, exclude: Tokens | None = None) -> Tokens:
        """Draw one value, never returning ``exclude``.

        Rejection sampling is tried once per pool value; if every attempt hits
        the excluded value the draw falls back to the remaining values.

        Raises
        ------
        MissingCategoryError
            If the category has no pool.
        ExhaustedPoolError
            If the pool holds nothing but ``exclude``.
        """
        values = self.values(category)
        for _ in range(len(values)):
            candidate = self._draw_once(category, values, rng)
            if candidate != exclude:
                return candidate
        remaining = [value for value in values if value != exclude]
        if not remaining:
            raise ExhaustedPoolError(f"Pool {category!r} only contains the original value {exclude!r}")
        return remaining[int(rng.integers(len(remaining)))]

    def _draw_once(self, category: str, values: tuple[Tokens, ...], rng: np.random.Generator) -> Tokens:
        if category == self.balanced_category and self.balance_groups:
            labels = list(self.balance_groups)
            group = self.balance_groups[labels[int(rng.integers(len(labels)))]]
            return group[int(rng.integers(len(group)))]
        return values[int(rng.integers(len(values)))]

    def extended(self, extra: Mapping[str, Iterable[Tokens]]) -> ReplacementPools:
        """Return pools with additional candidate values appended per category."""
        merged = {
            category: _dedupe((*values, *extra.get(category, ()))) for category, values in self.pools.items()
        }
        for category, values in extra.items():
            if category not in merged:
                merged[category] = _dedupe(values)
        return ReplacementPools(pools=merged, balance_groups=None, balanced_category=self.balanced_category)

    def singleton(self) -> ReplacementPools:
        """Return pools reduced to the first value of each category."""
        return ReplacementPools(pools={category: values[:1] for category, values in self.pools.items()})
