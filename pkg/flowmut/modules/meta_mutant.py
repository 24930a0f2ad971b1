"""
Mutant materialization and mutation switching.

`apply_patch` builds the standalone mutated graph of one mutant. The
MetaMutant instead keeps the original graph and switches one mutant on at
execution time through interpreter site hooks, so every mutant shares one
compiled program.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from modules import logger
from modules.dataflow_model import Dataset, ProgramGraph, ProgramOutput, Transformation, validate
from modules.dsl_parser import format_step
from modules.errors import PatchError, SiteLookupError
from modules.interpreter import (
    DatasetInstance,
    ExecutionOutcome,
    InputData,
    SiteHook,
    apply_transformation,
    execute,
)
from modules.mutation_operators import (
    DeleteSite,
    GraphPatch,
    InsertAfter,
    Mutant,
    ReplaceJoinWithAdjustment,
    ReplaceSite,
    SwapSites,
    WrapUdf,
)
from modules.udf_wrappers import WrappedUdf


# ---------------------------------------------------------------------------
# Standalone materialization
# ---------------------------------------------------------------------------

def _wrapped(t: Transformation, patch: WrapUdf) -> Transformation:
    if not 0 <= patch.udf_index < len(t.udfs):
        raise PatchError(f"site {t.id} has no function #{patch.udf_index}")
    udfs = list(t.udfs)
    udfs[patch.udf_index] = WrappedUdf(udfs[patch.udf_index], patch.wrapper)
    return replace(t, udfs=tuple(udfs))


def _renumber(transformations: Iterable[Transformation]) -> Tuple[Transformation, ...]:
    return tuple(replace(t, id=i) for i, t in enumerate(transformations))


def _fresh_name(graph: ProgramGraph, base: str) -> str:
    taken = {ds.name for ds in graph.datasets}
    name = base
    suffix = 1
    while name in taken:
        suffix += 1
        name = f"{base}{suffix}"
    return name


def apply_patch(graph: ProgramGraph, patch: GraphPatch) -> ProgramGraph:
    """Materialize one mutant as a new graph; sites are renumbered in program order"""
    try:
        target = graph.site(patch.site if not isinstance(patch, SwapSites) else patch.site_a)
    except SiteLookupError as exc:
        raise PatchError(str(exc)) from exc
    sites = list(graph.transformations)
    datasets = list(graph.datasets)
    outputs = list(graph.outputs)

    if isinstance(patch, ReplaceSite):
        sites[target.id] = replace(patch.transformation, id=target.id, output=target.output)
    elif isinstance(patch, WrapUdf):
        sites[target.id] = _wrapped(target, patch)
    elif isinstance(patch, ReplaceJoinWithAdjustment):
        sites[target.id] = replace(target, kind=patch.new_kind, join_fill=patch.adjustment)
    elif isinstance(patch, SwapSites):
        other = graph.site(patch.site_b)
        sites[target.id] = replace(target, kind=other.kind, udfs=other.udfs, ascending=other.ascending)
        sites[other.id] = replace(other, kind=target.kind, udfs=target.udfs, ascending=target.ascending)
    elif isinstance(patch, InsertAfter):
        produced = graph.dataset(target.output)
        staged = Dataset(max(ds.id for ds in datasets) + 1, _fresh_name(graph, f"{produced.name}_pre"),
                         produced.elem_type)
        datasets.append(staged)
        # the site now feeds a staging dataset; the inserted step writes the original one
        sites[target.id] = replace(target, output=staged.id)
        sites.insert(target.id + 1, Transformation(
            id=target.id + 1, kind=patch.kind, inputs=(staged.id,), output=produced.id, span=target.span))
    elif isinstance(patch, DeleteSite):
        if not 0 <= patch.keep_input < len(target.inputs):
            raise PatchError(f"site {target.id} has no input #{patch.keep_input}")
        kept = target.inputs[patch.keep_input]
        removed = target.output
        del sites[target.id]
        sites = [replace(t, inputs=tuple(kept if i == removed else i for i in t.inputs)) for t in sites]
        datasets = [ds for ds in datasets if ds.id != removed]
        outputs = [ProgramOutput(o.name, kept if o.dataset == removed else o.dataset) for o in outputs]
    else:
        raise PatchError(f"unsupported patch {type(patch).__name__}")

    mutated = ProgramGraph(
        name=graph.name,
        inputs=graph.inputs,
        datasets=tuple(datasets),
        transformations=_renumber(sites),
        outputs=tuple(outputs),
    )
    result = validate(mutated)
    if not result.ok:
        raise PatchError(f"patch {patch} produced an invalid graph: {result.diagnostics[0].message}")
    return mutated


# ---------------------------------------------------------------------------
# Mutation switching
# ---------------------------------------------------------------------------

def _run(t: Transformation, env: Mapping[int, DatasetInstance], out_type) -> DatasetInstance:
    return apply_transformation(t, [env[i] for i in t.inputs], out_type)


def site_hooks(graph: ProgramGraph, patch: GraphPatch) -> Dict[int, SiteHook]:
    """Hooks that make executing the original graph behave like apply_patch(graph, patch)"""
    if isinstance(patch, ReplaceSite):
        replacement = patch.transformation
        return {patch.site: lambda t, env, out: _run(replacement, env, out)}
    if isinstance(patch, WrapUdf):
        wrapped = _wrapped(graph.site(patch.site), patch)
        return {patch.site: lambda t, env, out: _run(wrapped, env, out)}
    if isinstance(patch, ReplaceJoinWithAdjustment):
        rejoined = replace(graph.site(patch.site), kind=patch.new_kind, join_fill=patch.adjustment)
        return {patch.site: lambda t, env, out: _run(rejoined, env, out)}
    if isinstance(patch, SwapSites):
        a, b = graph.site(patch.site_a), graph.site(patch.site_b)
        at_a = replace(a, kind=b.kind, udfs=b.udfs, ascending=b.ascending)
        at_b = replace(b, kind=a.kind, udfs=a.udfs, ascending=a.ascending)
        return {
            a.id: lambda t, env, out: _run(at_a, env, out),
            b.id: lambda t, env, out: _run(at_b, env, out),
        }
    if isinstance(patch, InsertAfter):
        follow = patch.kind

        def insert(t, env, out):
            produced = _run(t, env, out)
            staged = Transformation(id=t.id, kind=follow, inputs=(t.output,), output=t.output)
            return apply_transformation(staged, [produced], out)
        return {patch.site: insert}
    if isinstance(patch, DeleteSite):
        keep = patch.keep_input
        return {patch.site: lambda t, env, out: DatasetInstance(env[t.inputs[keep]].elements, out)}
    raise PatchError(f"unsupported patch {type(patch).__name__}")


@dataclass(frozen=True)
class MetaMutant:
    """The original program plus every mutant, each selectable by id"""
    original: ProgramGraph
    mutants: Tuple[Mutant, ...]
    hooks: Mapping[int, Mapping[int, SiteHook]]

    def mutant(self, mutant_id: int) -> Mutant:
        for m in self.mutants:
            if m.id == mutant_id:
                return m
        raise SiteLookupError(f"unknown mutant id {mutant_id} for program '{self.original.name}'")

    @property
    def ids(self) -> List[int]:
        return [m.id for m in self.mutants]

    def execute(self, inputs: Mapping[str, InputData], active_id: Optional[int] = None) -> ExecutionOutcome:
        if active_id is None:
            return execute(self.original, inputs)
        hooks = self.hooks.get(active_id)
        if hooks is None:
            raise SiteLookupError(f"unknown mutant id {active_id} for program '{self.original.name}'")
        return execute(self.original, inputs, hooks)

    def materialize(self, mutant_id: int) -> ProgramGraph:
        return apply_patch(self.original, self.mutant(mutant_id).patch)


def build_meta_mutant(graph: ProgramGraph, mutants: Iterable[Mutant]) -> MetaMutant:
    """Embed every mutant (removed ones included) behind an id switch"""
    mutants = tuple(mutants)
    hooks = {}
    for m in mutants:
        # materializing once checks that the patch is sound
        apply_patch(graph, m.patch)
        hooks[m.id] = site_hooks(graph, m.patch)
    logger.info(f"Built meta-mutant for '{graph.name}' with {len(mutants)} mutants")
    return MetaMutant(graph, mutants, hooks)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_mutation(graph: ProgramGraph, mutant: Mutant) -> Tuple[str, str]:
    """Source line(s) of the mutated site(s) before and after the mutation"""
    patch = mutant.patch
    touched = (patch.site_a, patch.site_b) if isinstance(patch, SwapSites) else (patch.site,)
    original = "\n".join(format_step(graph, graph.site(s)) for s in touched)
    if isinstance(patch, DeleteSite):
        t = graph.site(patch.site)
        kept = graph.dataset(t.inputs[patch.keep_input]).name
        return original, f"{graph.dataset(t.output).name} = {kept}"
    mutated_graph = apply_patch(graph, patch)
    shown = (patch.site, patch.site + 1) if isinstance(patch, InsertAfter) else touched
    mutated = "\n".join(format_step(mutated_graph, mutated_graph.site(s)) for s in shown)
    return original, mutated
