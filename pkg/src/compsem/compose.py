"""Phrase and sentence vectors under the grammar-guided model and its
competitors.

The grammar-guided (categorical) composition filters the Kronecker product
of the argument vectors through the relational word's tensor:

    intransitive          verb_1 .* subject           (order 1)
    transitive            verb_2 .* (subject x object)  (order 2)
    adjective-noun        adj_1 .* noun               (order 1)
    modified transitive   (adv_2 .* verb_2) .* ((adj_1 .* subject) x object)

where ``.*`` is the entry-wise product and ``x`` the Kronecker product.
Writing the transitive entry out, cell (i, j) of the sentence tensor is
subject_i * verb_ij * object_j, which is the low-dimensional collapse of
pairing every argument slot with the matching tensor axis; the full blown
tensor space is never materialized.

Competitor models live in the plain word-vector space: the additive model
sums the slot vectors, the multiplicative model multiplies them entry-wise,
and the baseline is the bare lexical vector of the head with no composition
at all. Both competitor folds run in sorted-lemma order, so their documented
insensitivity to word order holds bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .pregroup import CompositionRecipe
from .relational import RelationalLexicon
from .tensor import SemanticTensor, add, cosine, kron, pointwise

__all__ = [
    "CompositionError",
    "MODEL_KINDS",
    "PATTERNS",
    "canonical_model_kind",
    "PhraseSpec",
    "compose_categorical",
    "compose_competitor",
    "compose",
    "compose_recipe",
    "similarity",
]

MODEL_KINDS = ("categorical", "additive", "multiplicative", "baseline")

_MODEL_ALIASES = {"add": "additive", "multiply": "multiplicative", "mult": "multiplicative"}

PATTERNS = ("intransitive", "transitive", "modified-transitive", "adjective-noun")


class CompositionError(ValueError):
    """A required lexicon entry is missing or the phrase is malformed."""


def canonical_model_kind(name: str) -> str:
    kind = _MODEL_ALIASES.get(name, name)
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {name!r}")
    return kind


@dataclass(frozen=True)
class PhraseSpec:
    """A phrase pattern with its slot lemmas.

    Use the classmethod constructors; they validate the slots each pattern
    requires. The adjective and adverb of a modified transitive are
    optional.
    """

    pattern: str
    subject: Optional[str] = None
    verb: Optional[str] = None
    object: Optional[str] = None
    adjective: Optional[str] = None
    adverb: Optional[str] = None
    noun: Optional[str] = None

    @classmethod
    def intransitive(cls, subject: str, verb: str) -> "PhraseSpec":
        return cls("intransitive", subject=_req(subject), verb=_req(verb))

    @classmethod
    def transitive(cls, subject: str, verb: str, object: str) -> "PhraseSpec":
        return cls("transitive", subject=_req(subject), verb=_req(verb), object=_req(object))

    @classmethod
    def modified_transitive(
        cls,
        subject: str,
        verb: str,
        object: str,
        adjective: Optional[str] = None,
        adverb: Optional[str] = None,
    ) -> "PhraseSpec":
        return cls(
            "modified-transitive",
            subject=_req(subject),
            verb=_req(verb),
            object=_req(object),
            adjective=adjective or None,
            adverb=adverb or None,
        )

    @classmethod
    def adjective_noun(cls, adjective: str, noun: str) -> "PhraseSpec":
        return cls("adjective-noun", adjective=_req(adjective), noun=_req(noun))

    def slot_lemmas(self) -> tuple[str, ...]:
        """Present lemmas in surface order (adj sub verb obj adv; adj noun)."""
        if self.pattern == "adjective-noun":
            slots = (self.adjective, self.noun)
        else:
            slots = (self.adjective, self.subject, self.verb, self.object, self.adverb)
        return tuple(s for s in slots if s)

    def head_lemma(self) -> str:
        """The relational word of the phrase (verb, or the adjective)."""
        return self.verb if self.verb else self.adjective


def _req(lemma: str) -> str:
    if not lemma:
        raise CompositionError("empty lemma in phrase")
    return lemma


def _vector(lemma: str, vectors: Mapping[str, SemanticTensor]) -> SemanticTensor:
    v = vectors.get(lemma)
    if v is None:
        raise CompositionError(f"no vector for {lemma!r}")
    return v


def _relation(lemma: str, arity: int, relations: RelationalLexicon) -> SemanticTensor:
    t = relations.get(lemma, arity)
    if t is None:
        raise CompositionError(f"no order-{arity} tensor for {lemma!r}")
    return t


def compose_categorical(
    spec: PhraseSpec,
    vectors: Mapping[str, SemanticTensor],
    relations: RelationalLexicon,
) -> SemanticTensor:
    """Grammar-guided composition; the result order depends on the pattern.

    Nouns come from the plain vector lexicon; verbs, adjectives and adverbs
    from the relational lexicon at the arity the pattern requires (adverbs
    over a transitive verb are order 2 so the entry-wise product is
    well-shaped).
    """
    if spec.pattern == "intransitive":
        return pointwise(_vector(spec.subject, vectors), _relation(spec.verb, 1, relations))
    if spec.pattern == "adjective-noun":
        return pointwise(_relation(spec.adjective, 1, relations), _vector(spec.noun, vectors))
    if spec.pattern in ("transitive", "modified-transitive"):
        verb = _relation(spec.verb, 2, relations)
        if spec.adverb:
            verb = pointwise(_relation(spec.adverb, 2, relations), verb)
        subject = _vector(spec.subject, vectors)
        if spec.adjective:
            subject = pointwise(_relation(spec.adjective, 1, relations), subject)
        return pointwise(verb, kron(subject, _vector(spec.object, vectors)))
    raise CompositionError(f"unknown pattern {spec.pattern!r}")


def compose_competitor(
    kind: str,
    spec: PhraseSpec,
    lexical_vectors: Mapping[str, SemanticTensor],
) -> SemanticTensor:
    """Additive, multiplicative, or baseline composition, all order 1.

    These consume ordinary distributional vectors for every slot including
    the verb, never relational tensors. The baseline returns the head's
    lexical vector untouched, ignoring the nouns.
    """
    kind = canonical_model_kind(kind)
    if kind == "baseline":
        return _vector(spec.head_lemma(), lexical_vectors)
    if kind not in ("additive", "multiplicative"):
        raise ValueError(f"compose_competitor cannot run the {kind!r} model")
    lemmas = sorted(spec.slot_lemmas())
    result = _vector(lemmas[0], lexical_vectors)
    for lemma in lemmas[1:]:
        v = _vector(lemma, lexical_vectors)
        result = add(result, v) if kind == "additive" else pointwise(result, v)
    return result


def compose(
    kind: str,
    spec: PhraseSpec,
    vectors: Mapping[str, SemanticTensor],
    relations: Optional[RelationalLexicon] = None,
) -> SemanticTensor:
    kind = canonical_model_kind(kind)
    if kind == "categorical":
        if relations is None:
            raise CompositionError("the categorical model needs a relational lexicon")
        return compose_categorical(spec, vectors, relations)
    return compose_competitor(kind, spec, vectors)


def compose_recipe(
    recipe: CompositionRecipe,
    lemmas: Sequence[str],
    vectors: Mapping[str, SemanticTensor],
    relations: RelationalLexicon,
) -> SemanticTensor:
    """Execute a reduction recipe over the words of a sentence.

    The head's order-arity tensor is filtered entry-wise through the
    Kronecker product of its argument vectors, in slot order. This is the
    general form behind every fixed pattern and extends to ditransitives.
    """
    if recipe.arity == 0:
        # a head without adjoints is an atomic word
        return _vector(lemmas[recipe.head], vectors)
    head = _relation(lemmas[recipe.head], recipe.arity, relations)
    args = [_vector(lemmas[w], vectors) for w in recipe.slots]
    product = args[0]
    for v in args[1:]:
        product = kron(product, v)
    return pointwise(head, product)


def similarity(
    spec1: PhraseSpec,
    spec2: PhraseSpec,
    kind: str,
    vectors: Mapping[str, SemanticTensor],
    relations: Optional[RelationalLexicon] = None,
) -> float:
    """Cosine of the two composed phrases; both must share a pattern."""
    if spec1.pattern != spec2.pattern:
        raise CompositionError(
            f"cannot compare a {spec1.pattern} phrase with a {spec2.pattern} one"
        )
    return cosine(
        compose(kind, spec1, vectors, relations),
        compose(kind, spec2, vectors, relations),
    )
