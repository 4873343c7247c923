#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hemln/errors.hpp"
#include "hemln/mln.hpp"

namespace hemln {

// ---------------------------------------------------------------------------
// Composition expressions
//
//   expr  := LAYER (op LAYER)*
//   op    := '*[' LAYER ',' LAYER ']'
//   LAYER := [A-Za-z_][A-Za-z0-9_]*
//
// The operator spelling 'Θ[i,j]' is accepted as an alias for '*[i,j]'.
// Subscripts must repeat the two adjacent operand layers in order, every
// adjacent pair must have a declared coupling set, a layer may appear at most
// twice, and parenthesised grouping is recognised but rejected.
// ---------------------------------------------------------------------------

struct CompositionStep {
    std::string left;
    std::string right;
    std::size_t pos = 0; // offset of the step's operator in the source text
};

struct KCommunityExpression {
    std::string text;
    std::vector<std::string> layer_sequence; // operands in order
    std::vector<CompositionStep> steps;      // layer_sequence.size() - 1 entries
    std::size_t k = 0;                       // distinct layers
    bool cyclic = false;                     // some layer appears twice

    std::string unparse() const {
        std::string out = layer_sequence.empty() ? "" : layer_sequence[0];
        for (std::size_t s = 0; s < steps.size(); ++s)
            out += " *[" + steps[s].left + "," + steps[s].right + "] " +
                   layer_sequence[s + 1];
        return out;
    }
};

enum class StepCase {
    initial,        // first step: both layers enter the result
    new_layer,      // right layer unseen: tuples extend by one slot
    both_processed  // right layer already in the result: tuples update in place
};

inline const char* to_string(StepCase c) {
    switch (c) {
        case StepCase::initial: return "initial";
        case StepCase::new_layer: return "extend";
        case StepCase::both_processed: return "update";
    }
    return "?";
}

namespace detail {

enum class TokKind { layer, star, lbracket, rbracket, comma, end };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t pos;
};

inline std::vector<Token> tokenize_expression(std::string_view src) {
    std::vector<Token> toks;
    std::size_t i = 0;
    auto is_ident_start = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto is_ident = [&](char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        if (c == '(' || c == ')')
            throw NotSupportedError("parenthesised grouping is not supported", i);
        if (c == '*') {
            toks.push_back({TokKind::star, "*", i});
            ++i;
            continue;
        }
        // UTF-8 capital theta, accepted as an operator alias
        if (static_cast<unsigned char>(c) == 0xCE && i + 1 < src.size() &&
            static_cast<unsigned char>(src[i + 1]) == 0x98) {
            toks.push_back({TokKind::star, "*", i});
            i += 2;
            continue;
        }
        if (c == '[') {
            toks.push_back({TokKind::lbracket, "[", i});
            ++i;
            continue;
        }
        if (c == ']') {
            toks.push_back({TokKind::rbracket, "]", i});
            ++i;
            continue;
        }
        if (c == ',') {
            toks.push_back({TokKind::comma, ",", i});
            ++i;
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t start = i;
            while (i < src.size() && is_ident(src[i])) ++i;
            toks.push_back({TokKind::layer, std::string(src.substr(start, i - start)),
                            start});
            continue;
        }
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", i);
    }
    toks.push_back({TokKind::end, "", src.size()});
    return toks;
}

} // namespace detail

inline KCommunityExpression parse_expression(std::string_view src,
                                             const MultilayerNetwork& mln) {
    auto toks = detail::tokenize_expression(src);
    std::size_t at = 0;
    auto peek = [&]() -> const detail::Token& { return toks[at]; };
    auto next = [&]() -> const detail::Token& { return toks[at++]; };

    auto expect_layer = [&]() -> const detail::Token& {
        const auto& t = next();
        if (t.kind != detail::TokKind::layer)
            throw SyntaxError("expected a layer name", t.pos);
        if (!mln.layer_index(t.text))
            throw UnknownLayerError("unknown layer \"" + t.text + "\"", t.pos);
        return t;
    };
    auto expect = [&](detail::TokKind k, const char* what) -> const detail::Token& {
        const auto& t = next();
        if (t.kind != k) throw SyntaxError(std::string("expected ") + what, t.pos);
        return t;
    };

    KCommunityExpression e;
    e.text = std::string(src);
    e.layer_sequence.push_back(expect_layer().text);

    while (peek().kind != detail::TokKind::end) {
        const auto& op = expect(detail::TokKind::star, "'*' operator");
        expect(detail::TokKind::lbracket, "'['");
        const auto& sub_l = expect_layer();
        expect(detail::TokKind::comma, "','");
        const auto& sub_r = expect_layer();
        expect(detail::TokKind::rbracket, "']'");
        const auto& rhs = expect_layer();

        const std::string& lhs = e.layer_sequence.back();
        if (sub_l.text != lhs || sub_r.text != rhs.text)
            throw SubscriptMismatchError(
                "operator subscripts [" + sub_l.text + "," + sub_r.text +
                    "] must name the adjacent layers [" + lhs + "," + rhs.text + "]",
                op.pos);
        if (!mln.has_links(lhs, rhs.text))
            throw DisconnectedStepError("no coupling set between layers " + lhs +
                                            " and " + rhs.text,
                                        op.pos);
        e.steps.push_back({lhs, rhs.text, op.pos});
        e.layer_sequence.push_back(rhs.text);
    }

    std::map<std::string, std::size_t> count;
    for (const auto& l : e.layer_sequence)
        if (++count[l] > 2)
            throw NotSupportedError("layer \"" + l + "\" appears more than twice", 0);
    e.k = count.size();
    for (const auto& [l, c] : count)
        if (c == 2) e.cyclic = true;
    return e;
}

// Classifies every step by whether its right layer is already part of the
// running result when the step executes.
inline std::vector<StepCase> classify_steps(const KCommunityExpression& e) {
    std::vector<StepCase> out;
    std::set<std::string> seen;
    if (!e.layer_sequence.empty()) seen.insert(e.layer_sequence[0]);
    for (std::size_t s = 0; s < e.steps.size(); ++s) {
        const std::string& right = e.steps[s].right;
        if (s == 0)
            out.push_back(StepCase::initial);
        else if (seen.count(right))
            out.push_back(StepCase::both_processed);
        else
            out.push_back(StepCase::new_layer);
        seen.insert(right);
    }
    return out;
}

} // namespace hemln
