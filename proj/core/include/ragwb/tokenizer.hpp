#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ragwb {

/// Splits text into maximal runs of Unicode letters and digits, lower-cased
/// with the simple (one-to-one) case mapping. Accents are kept and nothing is
/// stemmed. Character classes come from the C library's UTF-8 locale.
class Tokenizer {
public:
    Tokenizer() = default;
    explicit Tokenizer(std::set<std::string, std::less<>> stopwords) : stopwords_(std::move(stopwords)) {}

    /// Throws ParseError on invalid UTF-8.
    std::vector<std::string> tokenize(std::string_view text) const;

    const std::set<std::string, std::less<>>& stopwords() const { return stopwords_; }

    /// One word per line; blank lines and lines starting with '#' are ignored.
    /// Words are normalized through tokenize() so they match emitted terms.
    static std::set<std::string, std::less<>> parse_stopwords(std::string_view text);

private:
    std::set<std::string, std::less<>> stopwords_;
};

inline std::vector<std::string> tokenize(std::string_view text) { return Tokenizer{}.tokenize(text); }

}  // namespace ragwb
