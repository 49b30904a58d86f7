#include "flowmc/program.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace flowmc {

namespace {

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

/// Raised inside a line handler; the line is skipped and parsing continues.
struct LineError {
    int column;
    std::string message;
};

/// Cursor over one source line with 1-based column bookkeeping.
class Cursor {
public:
    Cursor(std::string_view line, int column_base = 1) : line_(line), base_(column_base) {}

    int column() const { return base_ + static_cast<int>(pos_); }
    bool at_end()
    {
        skip_ws();
        return pos_ >= line_.size();
    }
    std::string_view rest()
    {
        skip_ws();
        return line_.substr(pos_);
    }

    std::string word(const char* what)
    {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < line_.size() && ident_char(line_[pos_]))
            ++pos_;
        if (start == pos_)
            fail(std::string("expected ") + what);
        return std::string(line_.substr(start, pos_ - start));
    }

    std::string name(const char* what)
    {
        int col = (skip_ws(), column());
        std::string w = word(what);
        if (!is_identifier(w))
            throw LineError{col, "'" + w + "' is not a valid " + what};
        return w;
    }

    bool accept(std::string_view tok)
    {
        skip_ws();
        if (line_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok)
    {
        if (!accept(tok))
            fail("expected '" + std::string(tok) + "'");
    }

    void expect_end()
    {
        if (!at_end())
            fail("unexpected trailing text '" + std::string(rest()) + "'");
    }

    [[noreturn]] void fail(const std::string& msg)
    {
        skip_ws();
        throw LineError{column(), msg};
    }

private:
    void skip_ws()
    {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_])))
            ++pos_;
    }

    std::string_view line_;
    int base_;
    std::size_t pos_ = 0;
};

std::int64_t parse_integer(std::string_view text, int column)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw LineError{column, "invalid integer '" + std::string(text) + "'"};
    return v;
}

Domain parse_domain(std::string_view text, int column)
{
    text = trim(text);
    if (text == "bool")
        return Domain::boolean();
    if (text == "int")
        return Domain::unbounded();
    if (text.substr(0, 3) == "int" && text.size() > 3 && std::isspace(static_cast<unsigned char>(text[3]))) {
        std::string_view range = trim(text.substr(3));
        auto dots = range.find("..");
        if (dots == std::string_view::npos)
            throw LineError{column, "expected 'lo..hi' in domain '" + std::string(text) + "'"};
        std::int64_t lo = parse_integer(trim(range.substr(0, dots)), column);
        std::int64_t hi = parse_integer(trim(range.substr(dots + 2)), column);
        return Domain::range(lo, hi);
    }
    throw LineError{column, "unknown domain '" + std::string(text) + "'"};
}

Value parse_value(std::string_view text, int column)
{
    text = trim(text);
    if (text == "true")
        return Value::boolean(true);
    if (text == "false")
        return Value::boolean(false);
    return Value::integer(parse_integer(text, column));
}

Expr parse_expr_at(std::string_view text, int column)
{
    try {
        return parse_expr(text, column);
    } catch (const SyntaxError& e) {
        throw LineError{e.column(), e.message()};
    }
}

/// Position of `kw` as a whole word in `s`, or npos.
std::size_t find_word(std::string_view s, std::string_view kw, std::size_t from = 0)
{
    for (std::size_t at = s.find(kw, from); at != std::string_view::npos; at = s.find(kw, at + 1)) {
        bool left = at == 0 || !ident_char(s[at - 1]);
        bool right = at + kw.size() >= s.size() || !ident_char(s[at + kw.size()]);
        if (left && right)
            return at;
    }
    return std::string_view::npos;
}

struct Position {
    int line = 0;
    int column = 0;
};

class ProgramParser {
public:
    explicit ProgramParser(std::string_view text) : text_(text) {}

    ParseResult run()
    {
        int line_no = 0;
        std::size_t start = 0;
        while (start <= text_.size()) {
            std::size_t end = text_.find('\n', start);
            if (end == std::string_view::npos)
                end = text_.size();
            ++line_no;
            std::string_view line = text_.substr(start, end - start);
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);
            if (!trim(line).empty()) {
                try {
                    handle(line, line_no);
                } catch (const LineError& e) {
                    syntax(line_no, e.column, e.message);
                }
            }
            start = end + 1;
        }
        finish_block();
        finish_procedure();

        if (!seen_program_)
            syntax(1, 1, "missing 'program <name>' header");

        ParseResult result;
        result.diagnostics = std::move(diags_);
        if (syntax_errors_ > 0)
            return result;
        for (auto d : validate_program(prog_)) {
            if (auto it = positions_.find(d.path); it != positions_.end()) {
                d.line = it->second.line;
                d.column = it->second.column;
            }
            result.diagnostics.push_back(std::move(d));
        }
        result.program = std::move(prog_);
        return result;
    }

private:
    void syntax(int line, int column, std::string message)
    {
        ++syntax_errors_;
        diags_.push_back({"SyntaxError", std::move(message), "", line, column});
    }

    void duplicate(int line, const std::string& what, const std::string& path)
    {
        diags_.push_back({"DuplicateName", what + " declared twice", path, line, 1});
    }

    void remember(const std::string& path, int line, int column = 1)
    {
        positions_.emplace(path, Position{line, column});
    }

    std::string proc_path() const { return "procedure " + proc_.name; }
    std::string block_path() const { return proc_path() + "/block " + block_.id; }

    void handle(std::string_view line, int line_no)
    {
        Cursor cur(line);
        std::string kw = cur.word("a keyword");
        if (kw == "program")
            return on_program(cur, line_no);
        if (kw == "main") {
            prog_.main = cur.name("procedure name");
            return cur.expect_end();
        }
        if (kw == "global")
            return on_global(cur, line_no);
        if (kw == "init")
            return on_init(cur);
        if (kw == "procedure")
            return on_procedure(cur, line_no);
        if (kw == "local")
            return on_local(cur, line_no);
        if (kw == "block")
            return on_block(cur, line_no);
        if (kw == "point")
            return on_point(cur, line_no);
        if (kw == "edge")
            return on_edge(cur, line_no);
        if (kw == "entry" || kw == "exit")
            return on_entry_exit(kw, cur);
        throw LineError{1, "unknown keyword '" + kw + "'"};
    }

    void on_program(Cursor& cur, int line_no)
    {
        if (seen_program_)
            throw LineError{1, "duplicate 'program' header"};
        seen_program_ = true;
        prog_.name = cur.name("program name");
        cur.expect_end();
        remember("program", line_no);
    }

    void on_global(Cursor& cur, int line_no)
    {
        std::string name = cur.name("variable name");
        cur.expect(":");
        int col = cur.column();
        Domain dom = parse_domain(cur.rest(), col);
        for (const auto& g : prog_.globals)
            if (g.name == name)
                return duplicate(line_no, "global '" + name + "'", "global " + name);
        prog_.globals.push_back({name, dom});
        remember("global " + name, line_no);
    }

    void on_init(Cursor& cur)
    {
        int col = cur.column() + 1;
        Expr e = parse_expr_at(cur.rest(), col);
        prog_.init_globals = prog_.init_globals ? conj(prog_.init_globals, e) : e;
    }

    void on_procedure(Cursor& cur, int line_no)
    {
        finish_block();
        finish_procedure();
        std::string name = cur.name("procedure name");
        std::string entry;
        if (!cur.at_end()) {
            std::string kw = cur.word("'entry'");
            if (kw != "entry")
                cur.fail("expected 'entry <block>' after procedure name");
            entry = cur.name("block name");
            cur.expect_end();
        }
        in_proc_ = true;
        proc_ = AnnotatedProcedure{};
        proc_.name = name;
        proc_.entry_block = entry;
        proc_line_ = line_no;
        remember(proc_path(), line_no);
    }

    void on_local(Cursor& cur, int line_no)
    {
        if (!in_proc_)
            throw LineError{1, "'local' outside a procedure"};
        if (in_block_)
            throw LineError{1, "'local' must precede the procedure's blocks"};
        std::string name = cur.name("variable name");
        cur.expect(":");
        int col = cur.column();
        std::string_view rest = cur.rest();
        auto eq = rest.find('=');
        Domain dom = parse_domain(rest.substr(0, eq), col);
        std::optional<Value> init;
        if (eq != std::string_view::npos)
            init = parse_value(rest.substr(eq + 1), col + static_cast<int>(eq) + 1);
        else
            init = dom.kind == Domain::Kind::Bool ? Value::boolean(false)
                                                  : Value::integer(dom.kind == Domain::Kind::Range ? dom.lo : 0);
        for (const auto& l : proc_.locals)
            if (l.name == name)
                return duplicate(line_no, "local '" + name + "'", proc_path() + "/local " + name);
        proc_.locals.push_back({name, dom});
        proc_.init_locals[name] = *init;
        remember(proc_path() + "/local " + name, line_no);
    }

    void on_block(Cursor& cur, int line_no)
    {
        if (!in_proc_)
            throw LineError{1, "'block' outside a procedure"};
        finish_block();
        AnnotatedBlock b;
        b.id = cur.name("block name");
        std::string_view rest = cur.rest();
        if (!rest.empty())
            b.contract = parse_contract(rest, cur.column());
        for (const auto& other : proc_.blocks)
            if (other.id == b.id) {
                duplicate(line_no, "block '" + b.id + "'", proc_path() + "/block " + b.id);
                skipping_block_ = true;
                in_block_ = true;
                block_ = std::move(b);
                return;
            }
        in_block_ = true;
        skipping_block_ = false;
        block_ = std::move(b);
        remember(block_path(), line_no);
    }

    Contract parse_contract(std::string_view rest, int column)
    {
        if (find_word(rest, "contract") != 0)
            throw LineError{column, "expected 'contract' after block name"};
        std::string_view body = rest.substr(8);
        int body_col = column + 8;

        struct Clause {
            std::string_view kw;
            std::size_t at = std::string_view::npos;
        };
        std::array<Clause, 3> clauses{{{"requires"}, {"ensures"}, {"assigns"}}};
        for (auto& c : clauses) {
            c.at = find_word(body, c.kw);
            if (c.at != std::string_view::npos && find_word(body, c.kw, c.at + 1) != std::string_view::npos)
                throw LineError{body_col + static_cast<int>(c.at), "duplicate '" + std::string(c.kw) + "' clause"};
        }
        std::size_t first = body.size();
        for (const auto& c : clauses)
            first = std::min(first, c.at);
        if (!trim(body.substr(0, first)).empty())
            throw LineError{body_col, "expected requires/ensures/assigns after 'contract'"};

        auto clause_text = [&](const Clause& c) {
            std::size_t start = c.at + c.kw.size();
            std::size_t end = body.size();
            for (const auto& o : clauses)
                if (o.at != std::string_view::npos && o.at > c.at)
                    end = std::min(end, o.at);
            return std::pair{body.substr(start, end - start), body_col + static_cast<int>(start)};
        };

        Contract c = Contract::spec(bool_lit(true), bool_lit(true), {});
        if (clauses[0].at != std::string_view::npos) {
            auto [text, col] = clause_text(clauses[0]);
            c.precondition = parse_expr_at(text, col);
        }
        if (clauses[1].at != std::string_view::npos) {
            auto [text, col] = clause_text(clauses[1]);
            c.postcondition = parse_expr_at(text, col);
        }
        if (clauses[2].at != std::string_view::npos) {
            auto [text, col] = clause_text(clauses[2]);
            std::string_view list = trim(text);
            std::size_t pos = 0;
            while (!list.empty() && pos <= list.size()) {
                std::size_t comma = list.find(',', pos);
                if (comma == std::string_view::npos)
                    comma = list.size();
                std::string name(trim(list.substr(pos, comma - pos)));
                if (!is_identifier(name))
                    throw LineError{col, "invalid variable '" + name + "' in assigns list"};
                c.assigns.push_back(name);
                pos = comma + 1;
            }
        }
        return c;
    }

    void need_block(const char* kw)
    {
        if (!in_block_)
            throw LineError{1, std::string("'") + kw + "' outside a block"};
    }

    void on_point(Cursor& cur, int line_no)
    {
        need_block("point");
        ControlPoint pt;
        pt.id = cur.name("point name");
        cur.expect(":");
        int col = cur.column();
        std::string_view body = cur.rest();
        pt.stmt = parse_statement(body, col);
        if (skipping_block_)
            return;
        if (block_.find_point(pt.id))
            return duplicate(line_no, "point '" + pt.id + "'", block_path() + "/point " + pt.id);
        block_.points.push_back(std::move(pt));
        remember(block_path() + "/point " + block_.points.back().id, line_no);
    }

    Statement parse_statement(std::string_view body, int column)
    {
        Cursor cur(body, column);
        if (cur.at_end())
            cur.fail("expected a statement");
        int col = cur.column();
        std::string head = cur.word("a statement");
        if (head == "return" || head == "skip") {
            cur.expect_end();
            return head == "return" ? Statement::ret() : Statement::skip();
        }
        if (head == "jump" || head == "call") {
            std::string target = cur.name(head == "jump" ? "block name" : "procedure name");
            cur.expect_end();
            return head == "jump" ? Statement::jump(target) : Statement::call(target);
        }
        if (!is_identifier(head))
            throw LineError{col, "'" + head + "' cannot be assigned"};
        cur.expect(":=");
        int ecol = cur.column() + 1;
        return Statement::assign(head, parse_expr_at(cur.rest(), ecol));
    }

    void on_edge(Cursor& cur, int line_no)
    {
        need_block("edge");
        BlockEdge e;
        e.from = cur.name("point name");
        cur.expect("->");
        e.to = cur.name("point name");
        if (!cur.at_end()) {
            std::string kw = cur.word("'when'");
            if (kw != "when")
                cur.fail("expected 'when <guard>'");
            int col = cur.column() + 1;
            std::string_view g = cur.rest();
            if (g.empty())
                cur.fail("expected a guard after 'when'");
            e.guard = parse_expr_at(g, col);
        }
        if (skipping_block_)
            return;
        block_.edges.push_back(std::move(e));
        remember(block_path() + "/edge " + block_.edges.back().from + "->" + block_.edges.back().to, line_no);
    }

    void on_entry_exit(const std::string& kw, Cursor& cur)
    {
        need_block(kw.c_str());
        std::string id = cur.name("point name");
        cur.expect_end();
        (kw == "entry" ? block_.entry : block_.exit) = id;
    }

    void finish_block()
    {
        if (!in_block_)
            return;
        in_block_ = false;
        if (skipping_block_)
            return;
        if (block_.entry.empty() && !block_.points.empty())
            block_.entry = block_.points.front().id;
        if (block_.exit.empty() && !block_.points.empty())
            block_.exit = block_.points.back().id;
        proc_.blocks.push_back(std::move(block_));
    }

    void finish_procedure()
    {
        if (!in_proc_)
            return;
        in_proc_ = false;
        if (proc_.entry_block.empty() && !proc_.blocks.empty())
            proc_.entry_block = proc_.blocks.front().id;
        if (prog_.find_procedure(proc_.name)) {
            duplicate(proc_line_, "procedure '" + proc_.name + "'", proc_path());
            return;
        }
        prog_.procedures.push_back(std::move(proc_));
    }

    std::string_view text_;
    AnnotatedProgram prog_;
    AnnotatedProcedure proc_;
    AnnotatedBlock block_;
    bool seen_program_ = false;
    bool in_proc_ = false;
    bool in_block_ = false;
    bool skipping_block_ = false;
    int proc_line_ = 0;
    int syntax_errors_ = 0;
    Diagnostics diags_;
    std::map<std::string, Position> positions_;
};

}  // namespace

ParseResult parse_program(std::string_view text)
{
    try {
        return ProgramParser(text).run();
    } catch (const std::exception& e) {
        ParseResult r;
        r.diagnostics.push_back({"SyntaxError", e.what(), "", 0, 0});
        return r;
    }
}

}  // namespace flowmc
