#include "corpusrep/relation.hpp"

#include <algorithm>

namespace corpusrep {

namespace {

enum class Kind { Word, Plus, Minus, Approx, End };

struct Token {
    Kind kind;
    std::string text;
    std::size_t pos;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Kind::Word: return "word '" + t.text + "'";
        case Kind::Plus: return "'+'";
        case Kind::Minus: return "'-'";
        case Kind::Approx: return "'~='";
        case Kind::End: return "end of input";
    }
    return "token";
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
        } else if (c == '+') {
            out.push_back({Kind::Plus, "+", i++});
        } else if (c == '-') {
            out.push_back({Kind::Minus, "-", i++});
        } else if (c == '~') {
            if (i + 1 >= text.size() || text[i + 1] != '=') {
                throw RelationSyntaxError(i, "expected '~=' but found a lone '~'");
            }
            out.push_back({Kind::Approx, "~=", i});
            i += 2;
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            const std::size_t start = i;
            while (i < text.size() && ((text[i] >= 'a' && text[i] <= 'z') || (text[i] >= '0' && text[i] <= '9'))) ++i;
            out.push_back({Kind::Word, std::string(text.substr(start, i - start)), start});
        } else {
            throw RelationSyntaxError(i, std::string("unexpected character '") + c +
                                             "' (words are lowercase letters and digits)");
        }
    }
    out.push_back({Kind::End, "", text.size()});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    Relation parse() {
        if (peek().kind == Kind::Approx) throw RelationSyntaxError(peek().pos, "empty left side");
        auto lhs = expr();
        if (peek().kind != Kind::Approx) {
            throw RelationSyntaxError(peek().pos, "expected '~=' but found " + describe(peek()));
        }
        next();
        if (peek().kind == Kind::End) throw RelationSyntaxError(peek().pos, "empty right side");

        Relation rel;
        std::vector<std::pair<Term, std::size_t>> rhs;
        if (peek().kind == Kind::Word && peek().text == "0" && tokens_[index_ + 1].kind == Kind::End) {
            next();
        } else {
            rhs = expr();
        }
        if (peek().kind != Kind::End) {
            throw RelationSyntaxError(peek().pos, "unexpected " + describe(peek()) + " after relation");
        }

        if (rhs.size() == 1) {
            rel.rhs = rhs.front().first.word;
        } else {
            for (auto& [term, pos] : rhs) lhs.push_back({Term{-term.sign, term.word}, pos});
        }

        for (std::size_t i = 0; i < lhs.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (lhs[i].first.word == lhs[j].first.word) {
                    throw RelationSyntaxError(lhs[i].second,
                                              "word '" + lhs[i].first.word + "' appears more than once");
                }
            }
            rel.lhs.push_back(lhs[i].first);
        }
        if (rel.rhs) {
            const auto it = std::find_if(rel.lhs.begin(), rel.lhs.end(),
                                         [&](const Term& t) { return t.word == *rel.rhs; });
            if (it != rel.lhs.end()) {
                throw RelationSyntaxError(rhs.front().second,
                                          "right-hand word '" + *rel.rhs + "' also appears on the left");
            }
        }
        return rel;
    }

private:
    const Token& peek() const { return tokens_[index_]; }
    const Token& next() { return tokens_[index_++]; }

    std::pair<Term, std::size_t> word(int sign) {
        const Token& t = peek();
        if (t.kind != Kind::Word) throw RelationSyntaxError(t.pos, "expected a word but found " + describe(t));
        next();
        return {Term{sign, t.text}, t.pos};
    }

    std::vector<std::pair<Term, std::size_t>> expr() {
        std::vector<std::pair<Term, std::size_t>> terms;
        terms.push_back(word(+1));
        while (peek().kind == Kind::Plus || peek().kind == Kind::Minus) {
            const Token& op = next();
            if (peek().kind != Kind::Word) {
                throw RelationSyntaxError(op.pos, "dangling operator " + describe(op) + " followed by " +
                                                      describe(peek()));
            }
            terms.push_back(word(op.kind == Kind::Plus ? +1 : -1));
        }
        return terms;
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
};

}  // namespace

std::vector<std::string> Relation::words() const {
    std::vector<std::string> out;
    for (const auto& t : lhs) out.push_back(t.word);
    if (rhs) out.push_back(*rhs);
    return out;
}

Relation parse_relation(std::string_view text) { return Parser(lex(text)).parse(); }

std::string unparse(const Relation& relation) {
    std::string out;
    for (std::size_t i = 0; i < relation.lhs.size(); ++i) {
        const auto& t = relation.lhs[i];
        if (i == 0) {
            // The grammar has no leading sign; the parser never yields a negative first term.
            if (t.sign < 0) throw std::invalid_argument("relation cannot start with a negative term");
        } else {
            out += t.sign > 0 ? " + " : " - ";
        }
        out += t.word;
    }
    out += " ~= ";
    out += relation.rhs ? *relation.rhs : "0";
    return out;
}

}  // namespace corpusrep
