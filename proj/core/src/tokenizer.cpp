#include "ragwb/tokenizer.hpp"

#include <clocale>
#include <cwctype>
#include <locale.h>

#include "ragwb/error.hpp"
#include "ragwb/utf8.hpp"

namespace ragwb {
namespace {

locale_t utf8_ctype() {
    static const locale_t loc = [] {
        for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8", "en_US.utf8"}) {
            if (locale_t l = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(nullptr))) return l;
        }
        return static_cast<locale_t>(nullptr);
    }();
    if (!loc) throw Error(ErrorKind::Io, "no UTF-8 locale available for tokenization (tried C.UTF-8, en_US.UTF-8)");
    return loc;
}

}  // namespace

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
    const locale_t loc = utf8_ctype();
    std::vector<std::string> terms;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        if (!stopwords_.contains(current)) terms.push_back(std::move(current));
        current.clear();
    };
    for (const char32_t cp : utf8::decode(text)) {
        const auto wc = static_cast<wint_t>(cp);
        if (iswalnum_l(wc, loc)) {
            utf8::append(current, static_cast<char32_t>(towlower_l(wc, loc)));
        } else {
            flush();
        }
    }
    flush();
    return terms;
}

std::set<std::string, std::less<>> Tokenizer::parse_stopwords(std::string_view text) {
    std::set<std::string, std::less<>> out;
    const Tokenizer plain;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty() || line.front() == '#') continue;
        for (auto& term : plain.tokenize(line)) out.insert(std::move(term));
    }
    return out;
}

}  // namespace ragwb
