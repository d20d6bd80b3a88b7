#include "ewcheck/parse.hpp"

#include <cctype>
#include <sstream>

#include "ewcheck/errors.hpp"
#include "ewcheck/rational.hpp"

namespace ew {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

enum class Tok { Int, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    int ticks = 0;  // trailing ' marks on identifiers
    int line = 1, col = 1;
};

class Lexer {
  public:
    Lexer(const std::string& src, int line0, int col0) : src_(src), line_(line0), col_(col0) {
        advance();
    }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) bump();
        tok_ = Token{Tok::End, "", 0, line_, col_};
        if (pos_ >= src_.size()) return;
        char c = src_[pos_];
        tok_.line = line_;
        tok_.col = col_;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            tok_.kind = Tok::Int;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            tok_.kind = Tok::Ident;
            tok_.text = src_.substr(start, pos_ - start);
            while (pos_ < src_.size() && src_[pos_] == '\'') {
                ++tok_.ticks;
                bump();
            }
            return;
        }
        switch (c) {
            case '+': tok_.kind = Tok::Plus; break;
            case '-': tok_.kind = Tok::Minus; break;
            case '*': tok_.kind = Tok::Star; break;
            case '/': tok_.kind = Tok::Slash; break;
            case '^': tok_.kind = Tok::Caret; break;
            case '(': tok_.kind = Tok::LParen; break;
            case ')': tok_.kind = Tok::RParen; break;
            case ',': tok_.kind = Tok::Comma; break;
            default:
                throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
        }
        tok_.text = std::string(1, c);
        bump();
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_, col_;
    Token tok_;
};

// ---------------------------------------------------------------------------
// Pratt expression parser
// ---------------------------------------------------------------------------

class ExprParser {
  public:
    ExprParser(const std::string& src, const TablePtr& table, int line0, int col0)
        : lex_(src, line0, col0), tab_(table) {}

    Expr parse() {
        Expr e = expression(0);
        const Token& t = lex_.peek();
        if (t.kind != Tok::End) throw SyntaxError(t.line, t.col, "unexpected '" + t.text + "'");
        return e;
    }

  private:
    // binding powers: + - (10), * / (20), unary - (25), ^ (30, right-assoc)
    Expr expression(int min_bp) {
        Expr lhs = prefix();
        for (;;) {
            const Token& op = lex_.peek();
            int bp;
            switch (op.kind) {
                case Tok::Plus:
                case Tok::Minus: bp = 10; break;
                case Tok::Star:
                case Tok::Slash: bp = 20; break;
                case Tok::Caret: bp = 30; break;
                default: return lhs;
            }
            if (bp <= min_bp) return lhs;
            Token t = lex_.next();
            if (t.kind == Tok::Caret) {
                Expr e = expression(29);  // right-associative
                if (!e.is_integer_constant())
                    throw SyntaxError(t.line, t.col, "non-integer exponent");
                long k = static_cast<long>(e.constant_value().get_num().get_si());
                try {
                    lhs = lhs.pow(k);
                } catch (const DivisionByZeroExpr&) {
                    throw SyntaxError(t.line, t.col, "zero raised to a negative power");
                }
                continue;
            }
            Expr rhs = expression(bp);
            switch (t.kind) {
                case Tok::Plus: lhs = lhs + rhs; break;
                case Tok::Minus: lhs = lhs - rhs; break;
                case Tok::Star: lhs = lhs * rhs; break;
                case Tok::Slash:
                    if (rhs.is_zero()) throw SyntaxError(t.line, t.col, "division by zero");
                    lhs = lhs / rhs;
                    break;
                default: break;
            }
        }
    }

    Expr prefix() {
        Token t = lex_.next();
        switch (t.kind) {
            case Tok::Int:
                return Expr::constant(Rational(mpz_class(t.text)), tab_);
            case Tok::Minus:
                return -expression(25);
            case Tok::LParen: {
                Expr e = expression(0);
                expect(Tok::RParen, ")");
                return e;
            }
            case Tok::Ident:
                return symbol(t);
            default:
                throw SyntaxError(t.line, t.col, "expected an expression, found '" + t.text + "'");
        }
    }

    Expr symbol(const Token& t) {
        auto found = tab_->find(t.text);
        if (!found) {
            // l_yt style jet of a multivariate function symbol
            auto us = t.text.find('_');
            if (us != std::string::npos && t.ticks == 0) {
                if (auto base = tab_->find(t.text.substr(0, us))) {
                    SymbolData bd = tab_->symbol(*base);
                    if (bd.kind == SymbolKind::Function && bd.deps.size() > 1) {
                        auto order = decompose_suffix(t.text.substr(us + 1), bd);
                        if (order) {
                            SymbolId jet = tab_->jet_at(*base, *order);
                            consume_args(tab_->symbol(jet));
                            return Expr::variable(tab_, jet);
                        }
                    }
                }
            }
            throw UnknownSymbol("line " + std::to_string(t.line) + ", column " + std::to_string(t.col) +
                                ": unknown symbol '" + t.text + "'");
        }
        SymbolData d = tab_->symbol(*found);
        if (t.ticks > 0) {
            if (d.kind != SymbolKind::Function || d.deps.size() != 1)
                throw SyntaxError(t.line, t.col,
                                  "derivative ticks require a declared one-variable function");
            SymbolId jet = tab_->jet_at(d.base, {t.ticks});
            consume_args(tab_->symbol(jet));
            return Expr::variable(tab_, jet);
        }
        if (!d.deps.empty()) consume_args(d);
        return Expr::variable(tab_, *found);
    }

    // A function symbol must be applied to exactly its dependency list.
    void consume_args(const SymbolData& d) {
        Token open = lex_.next();
        if (open.kind != Tok::LParen)
            throw SyntaxError(open.line, open.col, "function symbol '" + d.name + "' needs arguments");
        for (size_t i = 0; i < d.deps.size(); ++i) {
            Token a = lex_.next();
            if (a.kind != Tok::Ident || !tab_->find(a.text) || *tab_->find(a.text) != d.deps[i])
                throw SyntaxError(a.line, a.col,
                                  "'" + d.name + "' must be applied to its declared dependencies");
            if (i + 1 < d.deps.size()) expect(Tok::Comma, ",");
        }
        expect(Tok::RParen, ")");
    }

    std::optional<std::vector<int>> decompose_suffix(const std::string& suffix, const SymbolData& bd) {
        std::vector<int> order(bd.deps.size(), 0);
        size_t pos = 0;
        while (pos < suffix.size()) {
            bool matched = false;
            for (size_t i = 0; i < bd.deps.size(); ++i) {
                const std::string cn = tab_->symbol(bd.deps[i]).name;
                if (suffix.compare(pos, cn.size(), cn) == 0) {
                    ++order[i];
                    pos += cn.size();
                    matched = true;
                    break;
                }
            }
            if (!matched) return std::nullopt;
        }
        return order;
    }

    void expect(Tok kind, const char* what) {
        Token t = lex_.next();
        if (t.kind != kind) throw SyntaxError(t.line, t.col, std::string("expected '") + what + "'");
    }

    Lexer lex_;
    TablePtr tab_;
};

Expr parse_expr_at(const std::string& text, const TablePtr& table, int line0, int col0) {
    return ExprParser(text, table, line0, col0).parse();
}

}  // namespace

Expr parse_expr(const std::string& text, const TablePtr& table) {
    return parse_expr_at(text, table, 1, 1);
}

// ---------------------------------------------------------------------------
// Structure files
// ---------------------------------------------------------------------------

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Line {
    std::string text;
    int number;
    int indent;  // column of the first non-blank character
};

}  // namespace

StructureFile parse_structure(const std::string& text) {
    std::vector<Line> lines;
    {
        std::istringstream in(text);
        std::string raw;
        int no = 0;
        while (std::getline(in, raw)) {
            ++no;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            std::string t = strip(raw);
            if (t.empty()) continue;
            int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
            lines.push_back({t, no, indent});
        }
    }

    std::optional<std::array<std::string, 3>> coords;
    std::vector<std::pair<std::string, std::vector<std::string>>> functions;
    struct Assignment {
        int i, j;  // j = -1 for omega
        std::string rhs;
        int line, col;
    };
    std::vector<Assignment> metric_asg, omega_asg;
    int orientation = 1;
    RefPoint refpoint{1, 1, 1};
    std::optional<std::vector<int>> signature;

    enum class Section { None, Metric, Omega } section = Section::None;

    auto parse_sign = [](const std::string& tok, int line, int col) -> int {
        if (tok == "+1" || tok == "+") return 1;
        if (tok == "-1" || tok == "-") return -1;
        throw SyntaxError(line, col, "expected +1 or -1, found '" + tok + "'");
    };

    for (const Line& ln : lines) {
        auto colon = ln.text.find(':');
        std::string head = colon == std::string::npos ? "" : strip(ln.text.substr(0, colon));
        bool is_header = colon != std::string::npos &&
                         (head == "coords" || head == "functions" || head == "metric" || head == "omega" ||
                          head == "orientation" || head == "refpoint" || head == "signature");
        if (is_header) {
            std::string rest = strip(ln.text.substr(colon + 1));
            std::istringstream toks(rest);
            if (head == "coords") {
                std::vector<std::string> cs;
                std::string tok;
                while (toks >> tok) cs.push_back(tok);
                if (cs.size() != 3)
                    throw DimensionError("line " + std::to_string(ln.number) + ": expected exactly 3 coordinates, found " +
                                         std::to_string(cs.size()));
                coords = std::array<std::string, 3>{cs[0], cs[1], cs[2]};
                section = Section::None;
            } else if (head == "functions") {
                std::string tok;
                while (toks >> tok) {
                    auto open = tok.find('(');
                    if (open == std::string::npos || tok.back() != ')')
                        throw SyntaxError(ln.number, 1, "function declaration must look like R(t)");
                    std::string fname = tok.substr(0, open);
                    std::string args = tok.substr(open + 1, tok.size() - open - 2);
                    std::vector<std::string> deps;
                    std::istringstream as(args);
                    std::string a;
                    while (std::getline(as, a, ',')) deps.push_back(strip(a));
                    if (deps.empty()) throw SyntaxError(ln.number, 1, "function needs a dependency coordinate");
                    functions.push_back({fname, deps});
                }
                section = Section::None;
            } else if (head == "metric") {
                if (!rest.empty()) throw SyntaxError(ln.number, 1, "metric assignments belong on their own lines");
                section = Section::Metric;
            } else if (head == "omega") {
                if (!rest.empty()) throw SyntaxError(ln.number, 1, "omega assignments belong on their own lines");
                section = Section::Omega;
            } else if (head == "orientation") {
                orientation = parse_sign(rest, ln.number, 1);
                section = Section::None;
            } else if (head == "refpoint") {
                std::vector<std::string> vs;
                std::string tok;
                while (toks >> tok) vs.push_back(tok);
                if (vs.size() != 3) throw DimensionError("line " + std::to_string(ln.number) + ": refpoint needs 3 values");
                for (int i = 0; i < 3; ++i) {
                    auto r = parse_rational(vs[i]);
                    if (!r) throw SyntaxError(ln.number, 1, "invalid rational '" + vs[i] + "'");
                    refpoint[i] = *r;
                }
                section = Section::None;
            } else {  // signature
                std::vector<int> sig;
                std::string tok;
                while (toks >> tok) sig.push_back(parse_sign(tok, ln.number, 1));
                if (sig.size() != 3) throw DimensionError("line " + std::to_string(ln.number) + ": signature needs 3 signs");
                signature = sig;
                section = Section::None;
            }
            continue;
        }

        // Assignment line inside metric:/omega:
        auto eq = ln.text.find('=');
        if (section == Section::None || eq == std::string::npos)
            throw SyntaxError(ln.number, ln.indent, "expected a section header or an assignment");
        std::string lhs = strip(ln.text.substr(0, eq));
        std::string rhs = strip(ln.text.substr(eq + 1));
        if (rhs.empty()) throw SyntaxError(ln.number, static_cast<int>(eq) + 2, "missing right-hand side");

        if (section == Section::Metric) {
            int i, j;
            char g;
            char lb, comma, rb;
            std::istringstream ls(lhs);
            bool shape_ok = static_cast<bool>(ls >> g >> lb >> i >> comma >> j >> rb) && g == 'g' &&
                            lb == '[' && comma == ',' && rb == ']' && (ls >> std::ws, ls.peek() == EOF);
            if (!shape_ok)
                throw SyntaxError(ln.number, ln.indent, "metric assignment must look like g[i,j] = expr");
            if (i < 1 || i > 3 || j < 1 || j > 3)
                throw DimensionError("line " + std::to_string(ln.number) + ": metric index out of range 1..3");
            if (i > j)
                throw SyntaxError(ln.number, ln.indent, "metric assignments use i <= j (symmetry is implied)");
            for (const auto& a : metric_asg)
                if (a.i == i && a.j == j)
                    throw DuplicateAssignment("line " + std::to_string(ln.number) + ": g[" + std::to_string(i) + "," +
                                              std::to_string(j) + "] is assigned twice");
            metric_asg.push_back({i, j, rhs, ln.number, static_cast<int>(eq) + 2});
        } else {
            int i;
            char w, lb, rb;
            std::istringstream ls(lhs);
            bool shape_ok = static_cast<bool>(ls >> w >> lb >> i >> rb) && w == 'w' && lb == '[' &&
                            rb == ']' && (ls >> std::ws, ls.peek() == EOF);
            if (!shape_ok)
                throw SyntaxError(ln.number, ln.indent, "omega assignment must look like w[i] = expr");
            if (i < 1 || i > 3)
                throw DimensionError("line " + std::to_string(ln.number) + ": omega index out of range 1..3");
            for (const auto& a : omega_asg)
                if (a.i == i)
                    throw DuplicateAssignment("line " + std::to_string(ln.number) + ": w[" + std::to_string(i) +
                                              "] is assigned twice");
            omega_asg.push_back({i, -1, rhs, ln.number, static_cast<int>(eq) + 2});
        }
    }

    if (!coords) throw DimensionError("no coords declaration found");

    StructureFile sf;
    auto tab = SymbolTable::create(*coords);
    for (const auto& [fname, deps] : functions) {
        std::vector<SymbolId> dep_ids;
        for (const auto& d : deps) {
            auto id = tab->find(d);
            if (!id || tab->coord_index(*id) < 0)
                throw UnknownSymbol("function '" + fname + "' depends on undeclared coordinate '" + d + "'");
            dep_ids.push_back(*id);
        }
        tab->add_function(fname, dep_ids);
    }
    sf.chart = Chart{tab, signature.value_or(std::vector<int>{})};
    sf.functions = functions;
    sf.orientation = orientation;
    sf.refpoint = refpoint;

    for (const auto& a : metric_asg)
        sf.metric[a.i - 1][a.j - 1] = parse_expr_at(a.rhs, tab, a.line, a.col);
    for (const auto& a : omega_asg)
        sf.omega[a.i - 1] = parse_expr_at(a.rhs, tab, a.line, a.col);
    return sf;
}

WeylStructure StructureFile::build() const {
    Tensor g(chart, {Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            if (metric[i][j]) {
                g.at({i, j}) = *metric[i][j];
                if (i != j) g.at({j, i}) = *metric[i][j];
            }
    Tensor om(chart, {Slot::Down});
    for (int i = 0; i < 3; ++i)
        if (omega[i]) om.at({i}) = *omega[i];
    return WeylStructure(chart, Metric(std::move(g)), std::move(om), orientation, refpoint);
}

}  // namespace ew
