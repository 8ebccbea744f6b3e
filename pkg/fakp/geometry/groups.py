# This code is part of fakp and is licensed under the MIT license.
"""The five Euclidean transformation groups of R^d."""
from __future__ import annotations

import enum


class GroupComponent(str, enum.Enum):
    TRANSLATION = "translation"
    ROTATION = "rotation"
    REFLECTION = "reflection"


_COMPONENTS = {
    "t": frozenset({GroupComponent.TRANSLATION}),
    "so": frozenset({GroupComponent.ROTATION}),
    "o": frozenset({GroupComponent.ROTATION, GroupComponent.REFLECTION}),
    "se": frozenset({GroupComponent.TRANSLATION, GroupComponent.ROTATION}),
    "e": frozenset({GroupComponent.TRANSLATION, GroupComponent.ROTATION,
                    GroupComponent.REFLECTION}),
}


class GroupSpec(str, enum.Enum):
    """One of T(d), SO(d), O(d), SE(d) or E(d).

    The value is the short tag used on the command line and in config files.
    """
    TRANSLATIONS = "t"
    ROTATIONS = "so"
    ROTATIONS_REFLECTIONS = "o"
    TRANSLATIONS_ROTATIONS = "se"
    TRANSLATIONS_ROTATIONS_REFLECTIONS = "e"

    @classmethod
    def from_tag(cls, tag: str) -> GroupSpec:
        try:
            return cls(tag.strip().lower())
        except ValueError:
            valid = ", ".join(g.value for g in cls)
            errmsg = f"unknown group '{tag}', expected one of: {valid}"
            raise ValueError(errmsg) from None

    @property
    def tag(self) -> str:
        return self.value

    @property
    def components(self) -> frozenset[GroupComponent]:
        return _COMPONENTS[self.value]

    @property
    def has_translation(self) -> bool:
        return GroupComponent.TRANSLATION in self.components

    @property
    def has_rotation(self) -> bool:
        return GroupComponent.ROTATION in self.components

    @property
    def has_reflection(self) -> bool:
        return GroupComponent.REFLECTION in self.components

    def intersects(self, other: GroupSpec) -> bool:
        """Whether two groups share a component (translation, rotation or
        reflection)."""
        return bool(self.components & other.components)

    def frame_cardinality(self, d: int) -> int:
        """Size of the frame of a generic cloud in R^d."""
        if d not in (2, 3):
            raise ValueError(f"only d=2 and d=3 are supported, got d={d}")
        if not self.has_rotation:
            return 1
        if self.has_reflection:
            return 2 ** d
        return 2 ** (d - 1)

    def display_name(self, d: int = 3) -> str:
        return f"{self.value.upper()}({d})"


def frame_cardinality(group: GroupSpec, d: int) -> int:
    """1 for T, 2^(d-1) for SO/SE and 2^d for O/E."""
    return group.frame_cardinality(d)
