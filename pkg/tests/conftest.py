import functools

import pytest

from kreinq.models import ModelRecipe, FamilyRecipe, generate, reference_recipes

FAMILY_KINDS = ("AlphaType", "VWType", "ProjectorTheta", "Perturbed")


@functools.lru_cache(maxsize=None)
def instance(recipe: ModelRecipe):
    return generate(recipe)


@functools.lru_cache(maxsize=None)
def seed7(kind: str = "AlphaType"):
    return generate(ModelRecipe(seed=7, n_h=6, n_k=2, family=FamilyRecipe(kind=kind)))


def all_instances():
    for kind in FAMILY_KINDS:
        for recipe in reference_recipes(kind):
            yield recipe, instance(recipe)


@pytest.fixture(params=FAMILY_KINDS)
def seed7_family(request):
    return seed7(request.param)
