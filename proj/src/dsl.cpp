#include "rsineq/dsl.hpp"

#include "rsineq/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace rsineq {

std::string_view comparator_symbol(Comparator c) noexcept {
    return c == Comparator::GreaterEq ? ">=" : "<=";
}

LinearForm::LinearForm(std::vector<LinearTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw Error(ErrorCode::InvalidArgument, "linear form needs at least one term");
    std::sort(terms_.begin(), terms_.end(),
              [](const LinearTerm& a, const LinearTerm& b) { return a.variable < b.variable; });
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].coefficient == 0) {
            throw Error(ErrorCode::ZeroCoefficient, "zero coefficient on " + terms_[i].variable.str());
        }
        if (i > 0 && terms_[i].variable == terms_[i - 1].variable) {
            throw Error(ErrorCode::DuplicateVariableInGroup, terms_[i].variable.str() + " repeated in group");
        }
    }
}

std::vector<VariableId> RsExpression::variables() const {
    std::set<VariableId> seen;
    for (const auto& g : groups)
        for (const auto& t : g.terms()) seen.insert(t.variable);
    return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// Lexer shared by the expression parser

namespace {

enum class Tok { Int, Var, Plus, Minus, Star, LParen, RParen, LBrace, RBrace, Caret, Squared, Ge, Le, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::Int:
        case Tok::Var: return "'" + t.text + "'";
        default: return "'" + t.text + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            const unsigned char c = static_cast<unsigned char>(src_[pos_]);
            if (std::isdigit(c)) {
                lex_int(t);
            } else if (c >= 'A' && c <= 'Z') {
                std::size_t start = pos_;
                advance(1);
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(1);
                t.kind = Tok::Var;
                t.text = std::string(src_.substr(start, pos_ - start));
                if (t.text.size() > 11) fail("variable index too large", t);
                try {
                    (void)VariableId::parse(t.text);
                } catch (const Error&) {
                    fail("variable index too large", t);
                }
            } else if (match_utf8("\xE2\x88\x92")) {  // U+2212 minus sign
                t.kind = Tok::Minus;
                t.text = "-";
            } else if (match_utf8("\xE2\x89\xA5")) {  // >=
                t.kind = Tok::Ge;
                t.text = ">=";
            } else if (match_utf8("\xE2\x89\xA4")) {  // <=
                t.kind = Tok::Le;
                t.text = "<=";
            } else if (match_utf8("\xC2\xB7")) {  // middle dot
                t.kind = Tok::Star;
                t.text = "*";
            } else if (match_utf8("\xC2\xB2")) {  // superscript two
                t.kind = Tok::Squared;
                t.text = "^2";
            } else {
                switch (c) {
                    case '+': t.kind = Tok::Plus; break;
                    case '-': t.kind = Tok::Minus; break;
                    case '*': t.kind = Tok::Star; break;
                    case '(': t.kind = Tok::LParen; break;
                    case ')': t.kind = Tok::RParen; break;
                    case '{': t.kind = Tok::LBrace; break;
                    case '}': t.kind = Tok::RBrace; break;
                    case '^': t.kind = Tok::Caret; break;
                    case '>':
                    case '<':
                        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                            t.kind = c == '>' ? Tok::Ge : Tok::Le;
                            t.text = c == '>' ? ">=" : "<=";
                            advance(2);
                            out.push_back(t);
                            continue;
                        }
                        [[fallthrough]];
                    default: {
                        t.text = printable(c);
                        fail("unexpected character " + t.text, t);
                    }
                }
                t.text = std::string(1, static_cast<char>(c));
                advance(1);
            }
            out.push_back(t);
        }
    }

private:
    static std::string printable(unsigned char c) {
        if (std::isprint(c)) return "'" + std::string(1, static_cast<char>(c)) + "'";
        char buf[8];
        std::snprintf(buf, sizeof buf, "0x%02X", c);
        return buf;
    }

    [[noreturn]] static void fail(const std::string& msg, const Token& t) {
        throw SyntaxError(ErrorCode::Syntax, msg, t.line, t.column);
    }

    void advance(std::size_t bytes) {
        for (std::size_t i = 0; i < bytes && pos_ < src_.size(); ++i, ++pos_) {
            const unsigned char c = static_cast<unsigned char>(src_[pos_]);
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else if ((c & 0xC0) != 0x80) {
                ++col_;  // count code points, not continuation bytes
            }
        }
    }

    bool match_utf8(std::string_view seq) {
        if (src_.substr(pos_, seq.size()) == seq) {
            advance(seq.size());
            return true;
        }
        return false;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance(1);
            } else {
                return;
            }
        }
    }

    void lex_int(Token& t) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(1);
        t.kind = Tok::Int;
        t.text = std::string(src_.substr(start, pos_ - start));
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail("integer out of range", t);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class RsParser {
public:
    explicit RsParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    RsExpression parse() {
        RsExpression expr;
        parse_sum(expr, 0);
        if (expr.groups.empty()) fail(peek(), "expected at least one squared group");
        const Token& cmp = peek();
        if (cmp.kind == Tok::Ge) {
            expr.comparator = Comparator::GreaterEq;
        } else if (cmp.kind == Tok::Le) {
            expr.comparator = Comparator::LessEq;
        } else {
            fail(cmp, "expected '>=' or '<=' but found " + describe(cmp));
        }
        ++pos_;
        bool negative = false;
        if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) {
            negative = peek().kind == Tok::Minus;
            ++pos_;
        }
        const Token& b = expect(Tok::Int, "integer bound");
        expr.bound = negative ? -b.value : b.value;
        if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()) + " after bound");
        return expr;
    }

private:
    const Token& peek() const { return toks_[pos_]; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg, ErrorCode code = ErrorCode::Syntax) {
        throw SyntaxError(code, msg, t.line, t.column);
    }

    const Token& expect(Tok kind, const std::string& what) {
        const Token& t = peek();
        if (t.kind != kind) fail(t, "expected " + what + " but found " + describe(t));
        ++pos_;
        return t;
    }

    static std::int64_t add_checked(std::int64_t a, std::int64_t b, const Token& at) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) fail(at, "integer overflow in constant offset");
        return r;
    }

    // sum := [sign] item { sign item }, stopping at a comparator, '}' or end.
    void parse_sum(RsExpression& expr, int depth) {
        if (depth > 64) fail(peek(), "braces nested too deeply");
        bool first = true;
        for (;;) {
            const Token& t = peek();
            if (t.kind == Tok::Ge || t.kind == Tok::Le || t.kind == Tok::RBrace || t.kind == Tok::End) {
                if (first) fail(t, "expected a squared group but found " + describe(t));
                return;
            }
            int sign = 1;
            if (t.kind == Tok::Plus || t.kind == Tok::Minus) {
                sign = t.kind == Tok::Minus ? -1 : 1;
                ++pos_;
            } else if (!first) {
                fail(t, "expected '+' or '-' but found " + describe(t));
            }
            parse_item(expr, sign, depth);
            first = false;
        }
    }

    void parse_item(RsExpression& expr, int sign, int depth) {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            ++pos_;
            expr.constant_offset = add_checked(expr.constant_offset, sign * t.value, t);
        } else if (t.kind == Tok::LParen) {
            if (sign < 0) fail(t, "a squared group cannot be subtracted");
            expr.groups.push_back(parse_square());
        } else if (t.kind == Tok::LBrace) {
            if (sign < 0) fail(t, "a braced block cannot be subtracted");
            ++pos_;
            parse_sum(expr, depth + 1);
            expect(Tok::RBrace, "'}'");
        } else {
            fail(t, "expected '(', '{' or an integer but found " + describe(t));
        }
    }

    LinearForm parse_square() {
        expect(Tok::LParen, "'('");
        std::vector<LinearTerm> terms;
        std::set<VariableId> seen;
        bool first = true;
        while (peek().kind != Tok::RParen) {
            std::int64_t sign = 1;
            const Token& t = peek();
            if (t.kind == Tok::Plus || t.kind == Tok::Minus) {
                sign = t.kind == Tok::Minus ? -1 : 1;
                ++pos_;
            } else if (!first) {
                fail(t, "expected '+', '-' or ')' but found " + describe(t));
            }
            const Token& start = peek();
            std::int64_t coeff = 1;
            if (start.kind == Tok::Int) {
                coeff = start.value;
                ++pos_;
                if (peek().kind == Tok::Star) ++pos_;
            }
            const Token& var = expect(Tok::Var, "a variable");
            if (coeff == 0) fail(start, "zero coefficient on " + var.text, ErrorCode::ZeroCoefficient);
            VariableId id = VariableId::parse(var.text);
            if (!seen.insert(id).second) {
                fail(var, var.text + " appears twice in one group", ErrorCode::DuplicateVariableInGroup);
            }
            terms.push_back({sign * coeff, id});
            first = false;
        }
        if (terms.empty()) fail(peek(), "empty group");
        ++pos_;  // ')'
        if (peek().kind == Tok::Squared) {
            ++pos_;
        } else {
            expect(Tok::Caret, "'^2'");
            const Token& exponent = expect(Tok::Int, "exponent 2");
            if (exponent.value != 2) fail(exponent, "only squares (^2) are supported");
        }
        return LinearForm(std::move(terms));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

RsExpression parse_rs(std::string_view text) {
    return RsParser(Lexer(text).run()).parse();
}

std::string format_rs(const RsExpression& expr) {
    std::ostringstream out;
    for (std::size_t g = 0; g < expr.groups.size(); ++g) {
        if (g > 0) out << " + ";
        out << '(';
        const auto& terms = expr.groups[g].terms();
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::int64_t c = terms[i].coefficient;
            const std::uint64_t mag = c < 0 ? 0 - static_cast<std::uint64_t>(c) : static_cast<std::uint64_t>(c);
            if (i == 0) {
                if (c < 0) out << '-';
            } else {
                out << (c < 0 ? " - " : " + ");
            }
            if (mag != 1) out << mag << '*';
            out << terms[i].variable.str();
        }
        out << ")^2";
    }
    if (expr.constant_offset > 0) out << " + " << expr.constant_offset;
    if (expr.constant_offset < 0) {
        out << " - " << (0 - static_cast<std::uint64_t>(expr.constant_offset));
    }
    out << ' ' << comparator_symbol(expr.comparator) << ' ' << expr.bound;
    return out.str();
}

// ---------------------------------------------------------------------------
// Scenario files

bool ScenarioSpec::declares(const VariableId& v) const {
    return std::find(variables.begin(), variables.end(), v) != variables.end();
}

const std::string& ScenarioSpec::party_of(const VariableId& v) const {
    auto it = party_map.find(v);
    if (it == party_map.end()) throw Error(ErrorCode::UnmappedVariable, v.str() + " has no party");
    return it->second;
}

bool ScenarioSpec::is_sequential(const VariableId& a, const VariableId& b) const {
    return std::any_of(sequential_pairs.begin(), sequential_pairs.end(), [&](const auto& p) {
        return (p.first == a && p.second == b) || (p.first == b && p.second == a);
    });
}

bool ScenarioSpec::share_context(const VariableId& a, const VariableId& b) const {
    return std::any_of(contexts.begin(), contexts.end(), [&](const auto& ctx) {
        return std::find(ctx.begin(), ctx.end(), a) != ctx.end() &&
               std::find(ctx.begin(), ctx.end(), b) != ctx.end();
    });
}

void ScenarioSpec::validate() const {
    std::set<VariableId> declared;
    for (const auto& v : variables) {
        if (!declared.insert(v).second) throw Error(ErrorCode::InvalidArgument, v.str() + " declared twice");
        if (!party_map.count(v)) throw Error(ErrorCode::UnmappedVariable, v.str() + " has no party");
    }
    for (const auto& [v, party] : party_map) {
        if (!declared.count(v)) throw Error(ErrorCode::UndeclaredVariable, v.str() + " in party map");
        if (party.empty()) throw Error(ErrorCode::InvalidArgument, "empty party label for " + v.str());
    }
    for (const auto& ctx : contexts) {
        if (ctx.empty()) throw Error(ErrorCode::InvalidArgument, "empty context");
        std::set<VariableId> members;
        for (const auto& v : ctx) {
            if (!declared.count(v)) throw Error(ErrorCode::UndeclaredVariable, v.str() + " in context");
            if (!members.insert(v).second) throw Error(ErrorCode::InvalidArgument, v.str() + " repeated in context");
        }
    }
    for (const auto& [a, b] : sequential_pairs) {
        if (!declared.count(a)) throw Error(ErrorCode::UndeclaredVariable, a.str() + " in sequential pair");
        if (!declared.count(b)) throw Error(ErrorCode::UndeclaredVariable, b.str() + " in sequential pair");
        if (a == b) throw Error(ErrorCode::InvalidSequentialPair, a.str() + " sequenced with itself");
        if (party_map.at(a) != party_map.at(b)) {
            throw Error(ErrorCode::InvalidSequentialPair, a.str() + " -> " + b.str() + " crosses parties");
        }
        if (share_context(a, b)) {
            throw Error(ErrorCode::InconsistentContext,
                        "context contains the sequential pair " + a.str() + " -> " + b.str());
        }
    }
}

namespace {

struct Line {
    std::size_t number;
    std::string key;
    std::vector<std::string> words;
    std::vector<std::size_t> columns;
};

// Splits "key: a b, c" into key and words; commas, braces and "->" act as separators.
std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        ++number;
        start = end + 1;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto colon = raw.find(':');
        if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        if (colon == std::string_view::npos) {
            throw SyntaxError(ErrorCode::Syntax, "expected 'key: values'", number, 1);
        }
        Line line{number, {}, {}, {}};
        std::string_view key = raw.substr(0, colon);
        auto kb = key.find_first_not_of(" \t");
        auto ke = key.find_last_not_of(" \t\r");
        if (kb == std::string_view::npos) throw SyntaxError(ErrorCode::Syntax, "missing key", number, 1);
        line.key = std::string(key.substr(kb, ke - kb + 1));
        std::size_t i = colon + 1;
        while (i < raw.size()) {
            const char c = raw[i];
            if (c == ' ' || c == '\t' || c == '\r' || c == ',' || c == '{' || c == '}') {
                ++i;
                continue;
            }
            if (c == '-' && i + 1 < raw.size() && raw[i + 1] == '>') {
                i += 2;
                continue;
            }
            std::size_t j = i;
            while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r' && raw[j] != ',' &&
                   raw[j] != '{' && raw[j] != '}' && !(raw[j] == '-' && j + 1 < raw.size() && raw[j + 1] == '>')) {
                ++j;
            }
            line.words.emplace_back(raw.substr(i, j - i));
            line.columns.push_back(i + 1);
            i = j;
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

VariableId word_to_var(const Line& line, std::size_t k) {
    try {
        return VariableId::parse(line.words[k]);
    } catch (const Error&) {
        throw SyntaxError(ErrorCode::Syntax, "bad variable name '" + line.words[k] + "'", line.number,
                          line.columns[k]);
    }
}

bool valid_label(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
    const auto lines = split_lines(text);
    ScenarioSpec spec;
    std::set<VariableId> declared;

    // Declarations first so later lines may reference variables in any order.
    for (const auto& line : lines) {
        if (line.key != "variables") continue;
        for (std::size_t k = 0; k < line.words.size(); ++k) {
            VariableId v = word_to_var(line, k);
            if (!declared.insert(v).second) {
                throw SyntaxError(ErrorCode::Syntax, v.str() + " declared twice", line.number, line.columns[k]);
            }
            spec.variables.push_back(v);
            spec.party_map[v] = std::string(1, v.party);
        }
    }
    auto lookup = [&](const Line& line, std::size_t k) {
        VariableId v = word_to_var(line, k);
        if (!declared.count(v)) {
            throw SyntaxError(ErrorCode::UndeclaredVariable, v.str() + " is not declared", line.number,
                              line.columns[k]);
        }
        return v;
    };

    for (const auto& line : lines) {
        if (line.key == "variables") continue;
        if (line.key == "context") {
            std::vector<VariableId> ctx;
            for (std::size_t k = 0; k < line.words.size(); ++k) {
                VariableId v = lookup(line, k);
                if (std::find(ctx.begin(), ctx.end(), v) != ctx.end()) {
                    throw SyntaxError(ErrorCode::Syntax, v.str() + " repeated in context", line.number,
                                      line.columns[k]);
                }
                ctx.push_back(v);
            }
            if (ctx.empty()) throw SyntaxError(ErrorCode::Syntax, "empty context", line.number, 1);
            spec.contexts.push_back(std::move(ctx));
        } else if (line.key == "sequential") {
            if (line.words.size() != 2) {
                throw SyntaxError(ErrorCode::Syntax, "sequential expects exactly two variables", line.number, 1);
            }
            spec.sequential_pairs.emplace_back(lookup(line, 0), lookup(line, 1));
        } else if (line.key.rfind("party", 0) == 0) {
            std::string label = line.key.substr(5);
            label.erase(0, label.find_first_not_of(" \t"));
            if (!valid_label(label)) {
                throw SyntaxError(ErrorCode::Syntax, "party line needs a label: 'party <label>: vars'", line.number, 1);
            }
            for (std::size_t k = 0; k < line.words.size(); ++k) spec.party_map[lookup(line, k)] = label;
        } else {
            throw SyntaxError(ErrorCode::Syntax, "unknown key '" + line.key + "'", line.number, 1);
        }
    }

    // Post-parse checks report the offending line where one exists.
    for (const auto& line : lines) {
        if (line.key != "sequential") continue;
        VariableId a = lookup(line, 0), b = lookup(line, 1);
        if (a == b) throw SyntaxError(ErrorCode::InvalidSequentialPair, "variable sequenced with itself", line.number, 1);
        if (spec.party_map.at(a) != spec.party_map.at(b)) {
            throw SyntaxError(ErrorCode::InvalidSequentialPair, a.str() + " -> " + b.str() + " crosses parties",
                              line.number, 1);
        }
        if (spec.share_context(a, b)) {
            throw SyntaxError(ErrorCode::InconsistentContext,
                              "a context contains the sequential pair " + a.str() + " -> " + b.str(), line.number, 1);
        }
    }
    spec.validate();
    return spec;
}

std::string format_scenario(const ScenarioSpec& spec) {
    std::ostringstream out;
    out << "variables:";
    for (const auto& v : spec.variables) out << ' ' << v.str();
    out << '\n';
    std::map<std::string, std::vector<VariableId>> by_party;
    for (const auto& v : spec.variables) by_party[spec.party_of(v)].push_back(v);
    for (const auto& [label, vars] : by_party) {
        out << "party " << label << ':';
        for (const auto& v : vars) out << ' ' << v.str();
        out << '\n';
    }
    for (const auto& ctx : spec.contexts) {
        out << "context:";
        for (const auto& v : ctx) out << ' ' << v.str();
        out << '\n';
    }
    for (const auto& [a, b] : spec.sequential_pairs) out << "sequential: " << a.str() << " -> " << b.str() << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Observation tables

Observations parse_observations(std::string_view text) {
    Observations obs;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        auto eq = raw.find('=');
        if (eq == std::string_view::npos) throw SyntaxError(ErrorCode::Syntax, "expected '='", number, 1);
        std::istringstream lhs{std::string(raw.substr(0, eq))};
        std::vector<VariableId> vars;
        std::string word;
        while (lhs >> word) {
            try {
                vars.push_back(VariableId::parse(word));
            } catch (const Error&) {
                throw SyntaxError(ErrorCode::Syntax, "bad variable name '" + word + "'", number, 1);
            }
        }
        std::string rhs{raw.substr(eq + 1)};
        rhs.erase(0, rhs.find_first_not_of(" \t"));
        rhs.erase(rhs.find_last_not_of(" \t\r") + 1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), value);
        if (rhs.empty() || ec != std::errc{} || ptr != rhs.data() + rhs.size()) {
            throw SyntaxError(ErrorCode::Syntax, "expected a number after '='", number, eq + 2);
        }
        if (vars.size() == 2) {
            obs.correlators.push_back({vars[0], vars[1], value});
        } else if (vars.size() == 1) {
            obs.means.push_back({vars[0], value});
        } else {
            throw SyntaxError(ErrorCode::Syntax, "expected one or two variables before '='", number, 1);
        }
    }
    return obs;
}

}  // namespace rsineq
