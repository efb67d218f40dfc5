import itertools
import json

import pytest

from storyloom.grammar import (
    Alternative,
    Binding,
    DanglingSymbolError,
    DepthExceededError,
    EmptyInputError,
    Grammar,
    InvalidMappingError,
    ParseError,
    SymbolRef,
    UnknownTagError,
    apply_modifier,
    check_feasibility,
    decode,
    expand,
    find_dangling,
    grammar_to_doc,
    parse_alternative,
    parse_grammar,
    replay,
    serialize_grammar,
    unparse_alternative,
)


def make(doc):
    return parse_grammar(json.dumps(doc))


# --- independent derivation enumerator (oracle for expand/decode) ------------


def enumerate_texts(doc, symbol="origin"):
    """Every derivable text of a non-recursive grammar, by brute force.

    Works straight off the JSON document so it shares no code with the
    engine.  Bindings are handled by substituting one frozen expansion
    for every occurrence of the bound name.
    """
    import re

    def expand_string(s, env):
        s = re.sub(r"@[A-Z][A-Z0-9_,]*$", "", s)
        results = [""]
        i = 0
        while i < len(s):
            m = re.match(r"\[([^\[\]:#\s]+):#([^#\]]+)#\]", s[i:])
            if m:
                name, ref = m.group(1), m.group(2)
                base = ref.split(".")[0]
                mods = ref.split(".")[1:]
                out = []
                for prefix in results:
                    for sub in expand_symbol(base, env):
                        for mod in mods:
                            sub = apply_modifier(sub, mod)
                        out.extend(
                            prefix + rest
                            for rest in expand_string(
                                s[i + m.end():], {**env, name: sub})
                        )
                return out
            if s[i] == "#":
                j = s.index("#", i + 1)
                parts = s[i + 1:j].split(".")
                base, mods = parts[0], parts[1:]
                subs = [env[base]] if base in env else expand_symbol(base, env)
                out = []
                for sub in subs:
                    for mod in mods:
                        sub = apply_modifier(sub, mod)
                    out.extend(prefix + sub for prefix in results)
                results = out
                i = j + 1
            else:
                results = [prefix + s[i] for prefix in results]
                i += 1
        return results

    def expand_symbol(name, env):
        out = []
        for alt in doc[name]:
            out.extend(expand_string(alt, env))
        return out

    return set(expand_symbol(symbol, {}))


# --- modifiers ---------------------------------------------------------------


@pytest.mark.parametrize("word,expected", [
    ("stream", "a stream"),
    ("echo", "an echo"),
    ("ice shelf", "an ice shelf"),
    ("urn", "an urn"),
])
def test_article_modifier_picks_a_or_an(word, expected):
    assert apply_modifier(word, "a") == expected


def test_capitalize_modifier():
    assert apply_modifier("old bridge", "capitalize") == "Old bridge"
    assert apply_modifier("Δ marker", "capitalize") == "Δ marker"


@pytest.mark.parametrize("word,expected", [
    ("berry", "berries"),
    ("stone", "stones"),
    ("box", "boxes"),
    ("pass", "passes"),
    ("arch", "arches"),
    ("marsh", "marshes"),
    ("quiz", "quizes"),  # no consonant doubling, by design
    ("day", "days"),
])
def test_plural_modifier(word, expected):
    assert apply_modifier(word, "s") == expected


@pytest.mark.parametrize("word,expected", [
    ("glide", "glided"),
    ("hurry", "hurried"),
    ("play", "played"),
    ("walk", "walked"),
])
def test_past_modifier(word, expected):
    assert apply_modifier(word, "ed") == expected


def test_modifiers_reject_empty_input():
    for mod in ("a", "capitalize", "s", "ed"):
        with pytest.raises(EmptyInputError):
            apply_modifier("", mod)


def test_modifier_chain_applies_left_to_right():
    g = make({"origin": ["#w.a.capitalize#"], "w": ["stream"]})
    assert expand(g, "origin", 0).text == "A stream"


def test_unknown_modifier_in_grammar_is_a_parse_error():
    with pytest.raises(ParseError):
        make({"origin": ["#w.backwards#"], "w": ["x"]})


# --- parsing -----------------------------------------------------------------


def test_parse_plain_literal():
    alt = parse_alternative("just words here")
    assert alt.parts == ("just words here",)
    assert alt.tags == frozenset()


def test_parse_symbol_refs_and_modifiers():
    alt = parse_alternative("#a# and #b.s.capitalize#")
    ref_a, middle, ref_b = alt.parts
    assert ref_a == SymbolRef("a", ())
    assert middle == " and "
    assert ref_b == SymbolRef("b", ("s", "capitalize"))


def test_parse_binding():
    alt = parse_alternative("[here:#room#]#here#")
    binding, ref = alt.parts
    assert binding == Binding("here", SymbolRef("room", ()))
    assert ref == SymbolRef("here", ())


def test_parse_tag_suffix():
    alt = parse_alternative("water runs@STREAM,CAVERN")
    assert alt.tags == frozenset({"STREAM", "CAVERN"})
    assert alt.parts == ("water runs",)


def test_lowercase_at_suffix_is_literal_text():
    alt = parse_alternative("mail me@example")
    assert alt.tags == frozenset()
    assert alt.parts == ("mail me@example",)


def test_tag_must_be_at_end_of_alternative():
    alt = parse_alternative("before@TAG after")
    assert alt.tags == frozenset()


def test_unterminated_ref_is_an_error():
    with pytest.raises(ParseError) as exc:
        parse_alternative("broken #ref")
    assert exc.value.position is not None


def test_plain_bracket_stays_literal():
    alt = parse_alternative("a [note] here")
    assert alt.parts == ("a [note] here",)


def test_rule_names_validated():
    with pytest.raises(ParseError):
        make({"bad name": ["x"], "origin": ["#bad name#"]})
    with pytest.raises(ParseError):
        make({"": ["x"], "origin": ["y"]})


def test_rule_must_be_nonempty_list_of_strings():
    with pytest.raises(ParseError):
        make({"origin": []})
    with pytest.raises(ParseError):
        make({"origin": [3]})
    with pytest.raises(ParseError):
        parse_grammar("[1, 2]")


def test_invalid_json_reports_position():
    with pytest.raises(ParseError):
        parse_grammar("{not json")


def test_dangling_references_collected_together():
    with pytest.raises(DanglingSymbolError) as exc:
        make({"origin": ["#one# #two# #one#"]})
    assert sorted(exc.value.names) == ["one", "two"]


def test_binding_name_is_not_dangling():
    g = make({"origin": ["[spot:#w#]#spot#"], "w": ["q"]})
    assert find_dangling(g) == []


# --- round-trip --------------------------------------------------------------


def test_alternative_round_trip():
    for text in ("plain", "#a# #b.s#", "[x:#w#]#x# twice #x#", "go@NORTH,SOUTH"):
        doc = {"origin": [text], "a": ["1"], "b": ["2"], "w": ["3"],
               "x": ["unused"]}
        g = make(doc)
        assert unparse_alternative(g.rules["origin"][0]) == text


def test_grammar_serialization_round_trip():
    g = make({"origin": ["#a# #b#@HERE"], "a": ["x", "y"], "b": ["z"]})
    again = parse_grammar(serialize_grammar(g))
    assert again.rules == g.rules
    assert grammar_to_doc(again) == grammar_to_doc(g)


def test_tags_serialize_sorted():
    alt = parse_alternative("x@ZEBRA,APPLE")
    assert unparse_alternative(alt) == "x@APPLE,ZEBRA"


# --- seeded expansion --------------------------------------------------------


def test_expand_is_deterministic_per_seed(six_phenotype_grammar):
    a = expand(six_phenotype_grammar, "origin", 42)
    b = expand(six_phenotype_grammar, "origin", 42)
    assert a.text == b.text
    assert a.derivation_choices == b.derivation_choices


def test_expand_covers_only_derivable_texts(six_phenotype_grammar):
    texts = enumerate_texts(
        {"a": ["x", "y"], "b": ["p", "q", "r"], "origin": ["#a# #b#"]})
    seen = {expand(six_phenotype_grammar, "origin", s).text for s in range(200)}
    assert seen <= texts
    assert seen == texts  # 200 seeds is plenty for 6 phenotypes


def test_expand_unknown_symbol():
    g = make({"origin": ["x"]})
    with pytest.raises(DanglingSymbolError):
        expand(g, "nope", 0)


def test_binding_freezes_one_expansion():
    g = make({"origin": ["[x:#w#]#x# #x#"], "w": ["q"]})
    assert expand(g, "origin", 0).text == "q q"


def test_binding_frozen_even_with_alternatives():
    g = make({"origin": ["[x:#w#]#x# #x# #x#"], "w": ["left", "right"]})
    for seed in range(40):
        words = expand(g, "origin", seed).text.split()
        assert len(set(words)) == 1


def test_binding_shadows_rule_of_same_name():
    g = make({"origin": ["[w:#inner#]#w#"], "w": ["rule"], "inner": ["bound"]})
    assert expand(g, "origin", 5).text == "bound"


def test_binding_emits_nothing_at_its_site():
    g = make({"origin": ["[x:#w#]after"], "w": ["q"]})
    assert expand(g, "origin", 0).text == "after"


def test_tags_accumulate_across_derivation():
    g = make({"origin": ["#a#@TOP"], "a": ["deep@DEEP"]})
    assert expand(g, "origin", 3).tags == frozenset({"TOP", "DEEP"})


def test_recursion_depth_limit():
    g = make({"origin": ["#origin#"]})
    with pytest.raises(DepthExceededError):
        expand(g, "origin", 0)


def test_replay_reproduces_expansion(six_phenotype_grammar):
    for seed in range(20):
        s = expand(six_phenotype_grammar, "origin", seed)
        again = replay(six_phenotype_grammar, "origin", s.derivation_choices)
        assert again.text == s.text


# --- genome decoding ---------------------------------------------------------


def test_decode_worked_example(six_phenotype_grammar):
    assert decode(six_phenotype_grammar, "origin", [0, 1, 4]).text == "y q"


def test_decode_consumes_codon_even_for_single_choice(six_phenotype_grammar):
    # origin has one alternative, so codon 0 is spent there: flipping it
    # must not change which codons a and b read.
    base = decode(six_phenotype_grammar, "origin", [0, 1, 4]).text
    bumped = decode(six_phenotype_grammar, "origin", [5, 1, 4]).text
    assert base == bumped == "y q"


def test_decode_matches_enumeration(six_phenotype_grammar):
    doc = {"a": ["x", "y"], "b": ["p", "q", "r"], "origin": ["#a# #b#"]}
    expected = enumerate_texts(doc)
    decoded = {
        decode(six_phenotype_grammar, "origin", genome).text
        for genome in itertools.product(range(6), repeat=3)
    }
    assert decoded == expected


def test_decode_wraps_around():
    g = make({"origin": ["#a# #a# #a# #a#"], "a": ["0", "1"]})
    # 4 choice points for a, plus 1 for origin: genome of 2 wraps.
    s = decode(g, "origin", [7, 0])
    # codons consumed: origin 7%1, a 0%2=0, a 7%2=1, a 0%2=0, a 7%2=1
    assert s.text == "0 1 0 1"


def test_decode_wrap_budget_exhausted():
    g = make({"origin": ["#a#"], "a": ["again #a#", "done"]})
    # Always picking the recursive alternative exhausts the wrap budget.
    with pytest.raises(InvalidMappingError):
        decode(g, "origin", [0, 0], max_wraps=1)


def test_decode_depth_limit_is_invalid_mapping():
    g = make({"origin": ["#origin#"]})
    with pytest.raises(InvalidMappingError):
        decode(g, "origin", list(range(64)))


def test_decode_empty_genome():
    g = make({"origin": ["x"]})
    with pytest.raises(InvalidMappingError):
        decode(g, "origin", [])


# --- feasibility -------------------------------------------------------------


def storylet_with_tags(*tags):
    g = make({"origin": ["x" + ("@" + ",".join(tags) if tags else "")]})
    return expand(g, "origin", 0)


def test_untagged_storylet_fits_anywhere():
    s = storylet_with_tags()
    for tag in ("STREAM", "SNOW", "TUNNEL", "CAVERN", "VEGETATION"):
        assert check_feasibility(s, tag)


def test_matching_tag_is_feasible():
    assert check_feasibility(storylet_with_tags("STREAM"), "STREAM")


def test_compatible_neighbor_tag_is_feasible():
    assert check_feasibility(storylet_with_tags("CAVERN"), "STREAM")
    assert check_feasibility(storylet_with_tags("TUNNEL"), "SNOW")


def test_vegetation_does_not_fit_snow():
    assert not check_feasibility(storylet_with_tags("VEGETATION"), "SNOW")


def test_all_tags_must_be_compatible():
    s = storylet_with_tags("STREAM", "SNOW")
    assert not check_feasibility(s, "STREAM")


def test_unknown_room_tag_is_just_incompatible():
    # The table is keyed by storylet tags; an unheard-of room simply
    # matches nothing.
    assert not check_feasibility(storylet_with_tags("STREAM"), "LAVA")


def test_unknown_storylet_tag_raises():
    with pytest.raises(UnknownTagError):
        check_feasibility(storylet_with_tags("LAVA"), "STREAM")


def test_custom_compat_table():
    compat = {"B": frozenset({"A", "B"})}
    s = storylet_with_tags("B")
    assert check_feasibility(s, "A", compat)
    assert not check_feasibility(s, "Z", compat)
    with pytest.raises(UnknownTagError):
        check_feasibility(storylet_with_tags("C"), "A", compat)
