#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "xbn/format.hpp"

namespace xbn {

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space_and_comments();
        Token t;
        t.line = line_;
        t.column = col_;
        if (pos_ >= src_.size()) return t;

        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                t.text += advance();
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
            t.kind = Tok::Number;
            if (c == '-' || c == '+') t.text += advance();
            bool seen_digit = false;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
                seen_digit |= src_[pos_] != '.';
                t.text += advance();
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                t.text += advance();
                if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) t.text += advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    t.text += advance();
            }
            if (!seen_digit) fail(t, "malformed number '" + t.text + "'");
            return t;
        }
        if (c == '"') {
            t.kind = Tok::String;
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\n') fail(t, "unterminated string literal");
                t.text += advance();
            }
            if (pos_ >= src_.size()) fail(t, "unterminated string literal");
            advance();
            return t;
        }
        static constexpr std::string_view punct = "{}[]();,|=";
        if (punct.find(c) != std::string_view::npos) {
            t.kind = Tok::Punct;
            t.text = advance();
            return t;
        }
        fail(t, std::string("unexpected character '") + c + "'");
    }

    [[noreturn]] static void fail(const Token& at, const std::string& message) {
        throw ParseError({at.line, at.column, message, ParseDiagnostic::Severity::Error});
    }

private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct ProbBlock {
    CptSpec spec;
    int line = 0;
    // Line of each row, for row-sum diagnostics.
    std::vector<int> row_lines;
};

class BifParser {
public:
    BifParser(std::string_view text, std::vector<ParseDiagnostic>* warnings)
        : lex_(text), warnings_(warnings) {
        tok_ = lex_.next();
    }

    BayesianNetwork parse() {
        expect_keyword("network");
        std::string name = expect_ident("network name");
        expect("{");
        while (is_keyword("property")) skip_property(nullptr);
        expect("}");

        while (tok_.kind != Tok::End) {
            if (is_keyword("variable")) {
                parse_variable();
            } else if (is_keyword("probability")) {
                parse_probability();
            } else {
                Lexer::fail(tok_, "expected 'variable' or 'probability', got '" + tok_.text + "'");
            }
        }

        std::vector<CptSpec> specs;
        for (auto& block : blocks_) {
            check_rows(block);
            specs.push_back(std::move(block.spec));
        }
        return build_network(std::move(name), std::move(variables_), std::move(specs));
    }

private:
    void parse_variable() {
        next();
        Token name_tok = tok_;
        Variable var;
        var.name = expect_ident("variable name");
        if (var_lines_.count(var.name))
            Lexer::fail(name_tok, "variable '" + var.name + "' declared twice");
        var_lines_[var.name] = name_tok.line;
        expect("{");
        bool typed = false;
        while (!is_punct("}")) {
            if (is_keyword("property")) {
                skip_property(&var);
                continue;
            }
            if (typed) Lexer::fail(tok_, "duplicate 'type' declaration for '" + var.name + "'");
            expect_keyword("type");
            expect_keyword("discrete");
            expect("[");
            Token count_tok = tok_;
            std::size_t count = expect_int();
            expect("]");
            expect("{");
            var.states.push_back(expect_ident("state name"));
            while (is_punct(",")) {
                next();
                var.states.push_back(expect_ident("state name"));
            }
            expect("}");
            expect(";");
            if (var.states.size() != count)
                Lexer::fail(count_tok, "variable '" + var.name + "' declares " +
                                           std::to_string(count) + " states but lists " +
                                           std::to_string(var.states.size()));
            typed = true;
        }
        if (!typed) Lexer::fail(tok_, "variable '" + var.name + "' has no type declaration");
        expect("}");
        variables_.push_back(std::move(var));
    }

    void parse_probability() {
        ProbBlock block;
        block.line = tok_.line;
        next();
        expect("(");
        Token child_tok = tok_;
        block.spec.child = expect_ident("variable name");
        const Variable* child = lookup(child_tok, block.spec.child);
        std::vector<const Variable*> parents;
        if (is_punct("|")) {
            next();
            do {
                if (is_punct(",")) next();
                Token ptok = tok_;
                block.spec.parents.push_back(expect_ident("parent name"));
                parents.push_back(lookup(ptok, block.spec.parents.back()));
            } while (is_punct(","));
        }
        expect(")");
        expect("{");

        std::size_t row_count = 1;
        for (const Variable* p : parents) row_count *= p->cardinality();

        while (is_keyword("property")) skip_property(nullptr);
        if (is_keyword("table")) {
            int line = tok_.line;
            next();
            std::vector<double> flat = parse_numbers();
            expect(";");
            const std::size_t card = child->cardinality();
            if (flat.size() != row_count * card)
                Lexer::fail(tok_, "table for '" + child->name + "' has " +
                                      std::to_string(flat.size()) + " entries, expected " +
                                      std::to_string(row_count * card));
            for (std::size_t r = 0; r < row_count; ++r) {
                block.spec.rows.emplace_back(flat.begin() + r * card, flat.begin() + (r + 1) * card);
                block.row_lines.push_back(line);
            }
        } else {
            if (parents.empty())
                Lexer::fail(tok_, "'" + child->name + "' has no parents; expected 'table'");
            std::vector<std::optional<std::vector<double>>> rows(row_count);
            std::vector<int> lines(row_count, 0);
            while (is_punct("(")) {
                Token row_tok = tok_;
                next();
                std::size_t index = 0;
                for (std::size_t i = 0; i < parents.size(); ++i) {
                    if (i > 0) expect(",");
                    Token st = tok_;
                    std::string label = expect_ident("state name");
                    auto s = parents[i]->find_state(label);
                    if (!s)
                        Lexer::fail(st, "unknown state '" + label + "' for variable '" +
                                            parents[i]->name + "'");
                    index = index * parents[i]->cardinality() + *s;
                }
                expect(")");
                std::vector<double> values = parse_numbers();
                expect(";");
                if (rows[index])
                    Lexer::fail(row_tok, "duplicate row for parent configuration in '" +
                                             child->name + "'");
                if (values.size() != child->cardinality())
                    Lexer::fail(row_tok, "row for '" + child->name + "' has " +
                                             std::to_string(values.size()) + " entries, expected " +
                                             std::to_string(child->cardinality()));
                rows[index] = std::move(values);
                lines[index] = row_tok.line;
            }
            for (std::size_t r = 0; r < row_count; ++r) {
                if (!rows[r])
                    Lexer::fail(tok_, "probability block for '" + child->name +
                                          "' is missing parent configurations");
                block.spec.rows.push_back(std::move(*rows[r]));
                block.row_lines.push_back(lines[r]);
            }
        }
        while (is_keyword("property")) skip_property(nullptr);
        expect("}");
        blocks_.push_back(std::move(block));
    }

    // Row sums are checked here so the error can carry a line number.
    void check_rows(const ProbBlock& block) const {
        for (std::size_t r = 0; r < block.spec.rows.size(); ++r) {
            double sum = 0.0;
            for (double p : block.spec.rows[r]) sum += p;
            if (std::abs(sum - 1.0) > kRowSumTolerance) {
                std::ostringstream os;
                os.precision(12);
                os << "line " << block.row_lines[r] << ": variable '" << block.spec.child
                   << "' row sums to " << sum << ", expected 1";
                throw ValidationError(block.spec.child, os.str());
            }
        }
    }

    // property <tokens> ;   -- `property alias = X;` sets the variable alias.
    void skip_property(Variable* var) {
        Token start = tok_;
        next();
        std::vector<Token> body;
        while (!is_punct(";")) {
            if (tok_.kind == Tok::End) Lexer::fail(start, "unterminated property");
            body.push_back(tok_);
            next();
        }
        next();
        if (var && body.size() == 3 && body[0].kind == Tok::Ident && body[0].text == "alias" &&
            body[1].text == "=" && (body[2].kind == Tok::Ident || body[2].kind == Tok::String)) {
            var->alias = body[2].text;
            return;
        }
        if (warnings_)
            warnings_->push_back({start.line, start.column, "property ignored",
                                  ParseDiagnostic::Severity::Warning});
    }

    const Variable* lookup(const Token& at, const std::string& name) const {
        for (const auto& v : variables_)
            if (v.name == name) return &v;
        Lexer::fail(at, "undeclared variable '" + name + "'");
    }

    std::vector<double> parse_numbers() {
        std::vector<double> out{expect_number()};
        while (is_punct(",")) {
            next();
            out.push_back(expect_number());
        }
        return out;
    }

    double expect_number() {
        if (tok_.kind != Tok::Number) Lexer::fail(tok_, "expected a number, got '" + tok_.text + "'");
        double value = 0.0;
        const char* first = tok_.text.data();
        if (*first == '+') ++first;
        const char* last = tok_.text.data() + tok_.text.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) Lexer::fail(tok_, "malformed number '" + tok_.text + "'");
        next();
        return value;
    }

    std::size_t expect_int() {
        if (tok_.kind != Tok::Number) Lexer::fail(tok_, "expected an integer, got '" + tok_.text + "'");
        std::size_t value = 0;
        const char* last = tok_.text.data() + tok_.text.size();
        auto [ptr, ec] = std::from_chars(tok_.text.data(), last, value);
        if (ec != std::errc{} || ptr != last) Lexer::fail(tok_, "malformed integer '" + tok_.text + "'");
        next();
        return value;
    }

    std::string expect_ident(const char* what) {
        if (tok_.kind != Tok::Ident)
            Lexer::fail(tok_, std::string("expected ") + what + ", got '" + tok_.text + "'");
        std::string s = tok_.text;
        next();
        return s;
    }

    void expect_keyword(std::string_view kw) {
        if (!is_keyword(kw))
            Lexer::fail(tok_, "expected '" + std::string(kw) + "', got '" + tok_.text + "'");
        next();
    }

    void expect(std::string_view p) {
        if (!is_punct(p))
            Lexer::fail(tok_, "expected '" + std::string(p) + "', got '" +
                                  (tok_.kind == Tok::End ? std::string("end of input") : tok_.text) +
                                  "'");
        next();
    }

    bool is_keyword(std::string_view kw) const { return tok_.kind == Tok::Ident && tok_.text == kw; }
    bool is_punct(std::string_view p) const { return tok_.kind == Tok::Punct && tok_.text == p; }
    void next() { tok_ = lex_.next(); }

    Lexer lex_;
    Token tok_;
    std::vector<ParseDiagnostic>* warnings_;
    std::vector<Variable> variables_;
    std::map<std::string, int> var_lines_;
    std::vector<ProbBlock> blocks_;
};

std::string format_probability(double p) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, p);
    return std::string(buf, res.ptr);
}

std::string as_ident(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(0, "_");
    return out;
}

void write_row(std::ostringstream& os, std::span<const double> row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? ", " : "") << format_probability(row[i]);
    os << ";\n";
}

}  // namespace

BayesianNetwork parse_bif(std::string_view text, std::vector<ParseDiagnostic>* warnings) {
    return BifParser(text, warnings).parse();
}

std::string write_bif(const BayesianNetwork& net) {
    std::ostringstream os;
    os << "network " << as_ident(net.name()) << " {\n}\n";
    for (const auto& v : net.variables()) {
        os << "variable " << v.name << " {\n  type discrete [ " << v.cardinality() << " ] { ";
        for (std::size_t s = 0; s < v.states.size(); ++s) os << (s ? ", " : "") << v.states[s];
        os << " };\n";
        if (!v.alias.empty()) os << "  property alias = \"" << v.alias << "\";\n";
        os << "}\n";
    }
    for (VarId c = 0; c < net.size(); ++c) {
        const Cpt& cpt = net.cpt(c);
        os << "probability ( " << net.variable(c).name;
        for (std::size_t i = 0; i < cpt.parents().size(); ++i)
            os << (i ? ", " : " | ") << net.variable(cpt.parents()[i]).name;
        os << " ) {\n";
        if (cpt.parents().empty()) {
            os << "  table ";
            write_row(os, cpt.row(0));
        } else {
            std::vector<StateId> states(cpt.parents().size(), 0);
            for (std::size_t r = 0; r < cpt.row_count(); ++r) {
                os << "  (";
                for (std::size_t i = 0; i < states.size(); ++i)
                    os << (i ? ", " : " ") << net.variable(cpt.parents()[i]).states[states[i]];
                os << " ) ";
                write_row(os, cpt.row(r));
                for (std::size_t i = states.size(); i-- > 0;) {
                    if (++states[i] < net.cardinality(cpt.parents()[i])) break;
                    states[i] = 0;
                }
            }
        }
        os << "}\n";
    }
    return os.str();
}

}  // namespace xbn
