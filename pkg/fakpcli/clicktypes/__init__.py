from .grouptag import GroupTag
