#include "emit_internal.hpp"

#include <cctype>
#include <map>
#include <regex>
#include <sstream>

namespace flowmc {

namespace {

std::vector<std::string> split_lines(std::string_view text)
{
    std::vector<std::string> out;
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line))
        out.push_back(line);
    return out;
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

struct Token {
    std::string text;
    int line = 0;
    bool at_line_start = false;  // column 0
    bool ident = false;
    bool string = false;
};

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Shared tokenizer; `ops` lists multi-character operators, longest first.
std::vector<Token> tokenize(std::string_view text, const std::vector<std::string>& ops, std::string_view line_comment,
                            bool tla, std::vector<std::string>& problems)
{
    std::vector<Token> out;
    int line = 1;
    std::size_t line_begin = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            line_begin = ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (text.substr(i, line_comment.size()) == line_comment) {
            while (i < text.size() && text[i] != '\n')
                ++i;
            continue;
        }
        if (tla && text.substr(i, 2) == "(*") {
            auto end = text.find("*)", i + 2);
            if (end == std::string_view::npos) {
                problems.push_back("line " + std::to_string(line) + ": unterminated comment");
                break;
            }
            for (std::size_t k = i; k < end; ++k)
                if (text[k] == '\n')
                    ++line;
            i = end + 2;
            continue;
        }
        Token t;
        t.line = line;
        t.at_line_start = i == line_begin;
        if (tla && c == '-' && text.substr(i, 4) == "----") {
            std::size_t j = i;
            while (j < text.size() && text[j] == '-')
                ++j;
            t.text = "----";
            i = j;
        } else if (tla && c == '=' && text.substr(i, 4) == "====") {
            std::size_t j = i;
            while (j < text.size() && text[j] == '=')
                ++j;
            t.text = "====";
            i = j;
        } else if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j]))
                ++j;
            t.text = std::string(text.substr(i, j - i));
            t.ident = true;
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            t.text = std::string(text.substr(i, j - i));
            i = j;
        } else if (c == '"') {
            auto end = text.find('"', i + 1);
            if (end == std::string_view::npos) {
                problems.push_back("line " + std::to_string(line) + ": unterminated string");
                break;
            }
            t.text = std::string(text.substr(i, end - i + 1));
            t.string = true;
            i = end + 1;
        } else {
            t.text = std::string(1, c);
            for (const auto& op : ops)
                if (text.substr(i, op.size()) == op) {
                    t.text = op;
                    break;
                }
            i += t.text.size();
            // `]_vars`: the subscript belongs to the closing bracket
            if (tla && t.text == "]" && i < text.size() && text[i] == '_') {
                out.push_back(t);
                t.text = "_";
                t.at_line_start = false;
                ++i;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

void check_balance(const std::vector<Token>& tokens, const std::map<std::string, std::string>& pairs,
                   std::vector<std::string>& problems)
{
    std::vector<const Token*> open;
    std::map<std::string, std::string> closers;
    for (const auto& [o, c] : pairs)
        closers[c] = o;
    for (const auto& t : tokens) {
        if (pairs.count(t.text)) {
            open.push_back(&t);
        } else if (auto it = closers.find(t.text); it != closers.end()) {
            if (open.empty() || open.back()->text != it->second) {
                problems.push_back("line " + std::to_string(t.line) + ": unbalanced '" + t.text + "'");
                return;
            }
            open.pop_back();
        }
    }
    for (const Token* t : open)
        problems.push_back("line " + std::to_string(t->line) + ": '" + t->text + "' is never closed");
}

}  // namespace

std::vector<std::string> lint_tla(std::string_view module)
{
    std::vector<std::string> problems;
    auto tokens = tokenize(module, {"<<", ">>", "/\\", "\\/", "\\in", "\\o", "\\div", "==", "=<", ">=", "=>", "..", "[]"},
                           "\\*", true, problems);
    // `[]` is the box operator only before `[`; elsewhere it would be brackets.
    check_balance(tokens, {{"(", ")"}, {"[", "]"}, {"{", "}"}, {"<<", ">>"}}, problems);

    std::set<std::string> declared{"MODULE", "EXTENDS", "CONSTANT", "CONSTANTS", "VARIABLE", "VARIABLES", "IF",
                                   "THEN",   "ELSE",    "LET",      "IN",        "UNCHANGED", "TRUE",     "FALSE",
                                   "BOOLEAN", "Head",   "Tail",     "Len",       "Seq",       "Append",   "Nat",
                                   "Int"};
    std::set<std::string> variables;
    std::set<std::string> params;
    std::string current_def;
    enum class Mode { Body, Declare, Skip } mode = Mode::Body;
    bool declare_variables = false;
    int mode_line = 0;

    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const Token& t = tokens[k];
        if (mode != Mode::Body && t.line != mode_line)
            mode = Mode::Body;
        if (t.text == "----" || t.text == "====")
            continue;
        if (t.text == "MODULE" && k + 1 < tokens.size()) {
            declared.insert(tokens[++k].text);
            continue;
        }
        if (t.text == "EXTENDS") {
            mode = Mode::Skip;
            mode_line = t.line;
            continue;
        }
        if (t.text == "CONSTANT" || t.text == "CONSTANTS" || t.text == "VARIABLE" || t.text == "VARIABLES") {
            mode = Mode::Declare;
            mode_line = t.line;
            declare_variables = t.text[0] == 'V';
            continue;
        }
        if (mode == Mode::Skip)
            continue;
        if (mode == Mode::Declare) {
            if (t.ident) {
                declared.insert(t.text);
                if (declare_variables)
                    variables.insert(t.text);
            }
            continue;
        }
        if (t.ident && t.at_line_start) {
            // Name == or Name(p, q) ==
            std::size_t j = k + 1;
            std::set<std::string> ps;
            if (j < tokens.size() && tokens[j].text == "(") {
                for (++j; j < tokens.size() && tokens[j].text != ")"; ++j)
                    if (tokens[j].ident)
                        ps.insert(tokens[j].text);
                ++j;
            }
            if (j < tokens.size() && tokens[j].text == "==") {
                declared.insert(t.text);
                current_def = t.text;
                params = std::move(ps);
                k = j;
                continue;
            }
        }
        if (t.text == "LET" && k + 2 < tokens.size() && tokens[k + 2].text == "==") {
            params.insert(tokens[k + 1].text);
            k += 2;
            continue;
        }
        if (t.ident && !declared.count(t.text) && !params.count(t.text))
            problems.push_back("line " + std::to_string(t.line) + ": '" + t.text + "' is used before it is declared");
        if (t.text == "'") {
            if (current_def == "Init")
                problems.push_back("line " + std::to_string(t.line) + ": primed variable in Init");
            if (k == 0 || !variables.count(tokens[k - 1].text))
                problems.push_back("line " + std::to_string(t.line) + ": prime on something other than a variable");
        }
    }
    return problems;
}

std::vector<std::string> lint_nuxmv(std::string_view model)
{
    std::vector<std::string> problems;
    auto tokens = tokenize(model, {":=", "..", "!=", "<=", ">=", "<->", "->"}, "--", false, problems);
    check_balance(tokens, {{"(", ")"}, {"[", "]"}, {"{", "}"}, {"case", "esac"}}, problems);

    const std::set<std::string> keywords{"MODULE", "main", "VAR", "DEFINE", "INIT", "TRANS", "case", "esac",
                                         "next",   "in",   "TRUE", "FALSE", "array",  "of",   "boolean", "integer",
                                         "mod"};
    const std::set<std::string> sections{"VAR", "DEFINE", "INIT", "TRANS"};
    std::set<std::string> declared;
    std::set<std::string> variables;
    std::string section;
    int depth = 0;  // inside a VAR type or a DEFINE body

    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const Token& t = tokens[k];
        if (sections.count(t.text)) {
            section = t.text;
            depth = 0;
            continue;
        }
        if (t.text == ";") {
            depth = 0;
            continue;
        }
        bool head = depth == 0 && t.ident && k + 1 < tokens.size();
        if (section == "VAR" && head && tokens[k + 1].text == ":") {
            declared.insert(t.text);
            variables.insert(t.text);
            depth = 1;
            ++k;
            continue;
        }
        if (section == "VAR") {
            if (t.ident && !keywords.count(t.text))
                declared.insert(t.text);  // enumeration constant
            continue;
        }
        if (section == "DEFINE" && head && tokens[k + 1].text == ":=") {
            declared.insert(t.text);
            depth = 1;
            ++k;
            continue;
        }
        if (t.text == "next") {
            if (section == "INIT")
                problems.push_back("line " + std::to_string(t.line) + ": next() in INIT");
            if (k + 2 >= tokens.size() || tokens[k + 1].text != "(" || !variables.count(tokens[k + 2].text))
                problems.push_back("line " + std::to_string(t.line) + ": next() must wrap a declared variable");
            else {
                std::size_t j = k + 3;
                if (j < tokens.size() && tokens[j].text == "[") {
                    while (j < tokens.size() && tokens[j].text != "]") {
                        if (tokens[j].text == "next")
                            problems.push_back("line " + std::to_string(t.line) + ": nested next()");
                        ++j;
                    }
                    ++j;
                }
                if (j >= tokens.size() || tokens[j].text != ")")
                    problems.push_back("line " + std::to_string(t.line) + ": next() must wrap a declared variable");
            }
            continue;
        }
        if (t.ident && !keywords.count(t.text) && !declared.count(t.text))
            problems.push_back("line " + std::to_string(t.line) + ": '" + t.text + "' is used before it is declared");
    }
    return problems;
}

std::vector<ActionShape> scan_tla(std::string_view module)
{
    auto lines = split_lines(module);
    std::string node_var, stack_var;
    std::map<std::string, std::vector<std::string>> defs;
    std::string current;
    for (const auto& line : lines) {
        if (line.rfind("VARIABLES ", 0) == 0) {
            std::string rest = line.substr(10);
            auto c1 = rest.find(',');
            node_var = trim(rest.substr(0, c1));
            auto c2 = rest.find(',', c1 + 1);
            stack_var = trim(rest.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
            continue;
        }
        if (!line.empty() && line[0] != ' ' && line.size() > 3 && line.substr(line.size() - 3) == " ==") {
            current = line.substr(0, line.size() - 3);
            defs[current];
            continue;
        }
        if (line.empty() || line[0] != ' ') {
            current.clear();
            continue;
        }
        if (!current.empty())
            defs[current].push_back(trim(line));
    }

    std::vector<ActionShape> out;
    const std::regex quoted_node("^/\\\\ (\\w+)(')? = \"([^\"]*)\"$");
    for (const auto& line : defs["Next"]) {
        if (line.rfind("\\/ ", 0) != 0)
            continue;
        ActionShape shape;
        shape.name = line.substr(3);
        for (const auto& body : defs[shape.name]) {
            std::smatch m;
            if (std::regex_match(body, m, quoted_node) && m[1] == node_var) {
                (m[2].matched ? shape.target : shape.source) = m[3];
            } else if (body == "/\\ " + stack_var + "' = " + stack_var) {
                shape.effect = StackEffect::None;
            } else if (body.rfind("/\\ " + stack_var + "' = push(", 0) == 0) {
                shape.effect = StackEffect::Push;
            } else if (body.rfind("/\\ " + stack_var + "' = pop(", 0) == 0) {
                shape.effect = StackEffect::Pop;
            }
        }
        out.push_back(std::move(shape));
    }
    return out;
}

std::vector<ActionShape> scan_nuxmv(std::string_view model)
{
    auto lines = split_lines(model);
    std::string node_var;
    std::string section;
    std::map<std::string, std::vector<std::string>> defs;
    std::vector<std::string> trans;
    std::string current;
    for (const auto& raw : lines) {
        std::string line = trim(raw);
        if (line == "VAR" || line == "DEFINE" || line == "INIT" || line == "TRANS") {
            section = line;
            continue;
        }
        if (section == "VAR" && node_var.empty()) {
            node_var = trim(line.substr(0, line.find(':')));
        } else if (section == "DEFINE") {
            if (line.size() > 3 && line.substr(line.size() - 3) == " :=") {
                current = line.substr(0, line.size() - 3);
                continue;
            }
            if (line.rfind("& ", 0) == 0)
                line = line.substr(2);
            if (!line.empty() && line.back() == ';')
                line.pop_back();
            defs[current].push_back(line);
        } else if (section == "TRANS") {
            if (line.rfind("| ", 0) == 0)
                line = line.substr(2);
            if (!line.empty() && line.back() == ';')
                line.pop_back();
            trans.push_back(line);
        }
    }

    std::vector<ActionShape> out;
    for (const auto& name : trans) {
        ActionShape shape;
        shape.name = name;
        for (const auto& c : defs[name]) {
            if (c.rfind(node_var + " = ", 0) == 0)
                shape.source = c.substr(node_var.size() + 3);
            else if (c.rfind("next(" + node_var + ") = ", 0) == 0 && c.find("case") == std::string::npos)
                shape.target = c.substr(node_var.size() + 9);
            else if (c == "stack_keep")
                shape.effect = StackEffect::None;
            else if (c == "push_locals")
                shape.effect = StackEffect::Push;
            else if (c == "pop_frame")
                shape.effect = StackEffect::Pop;
        }
        out.push_back(std::move(shape));
    }
    return out;
}

}  // namespace flowmc
