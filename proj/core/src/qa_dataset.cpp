#include "ragwb/qa_dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "ragwb/io.hpp"
#include "ragwb/prng.hpp"
#include "ragwb/utf8.hpp"
#include "spdlog/spdlog.h"

namespace ragwb::qa {
namespace {

bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
           c == 0x00A0 || c == 0x2028 || c == 0x2029;
}

// Cut positions are code-point indices in (begin, end]; 0 means "none found".
std::size_t last_paragraph_cut(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end) {
    std::size_t best = 0;
    for (std::size_t i = begin; i < end; ++i) {
        if (cps[i] != U'\n') continue;
        std::size_t j = i + 1;
        while (j < end && (cps[j] == U' ' || cps[j] == U'\t' || cps[j] == U'\r')) ++j;
        if (j < end && cps[j] == U'\n') best = j + 1;
    }
    return best;
}

std::size_t last_sentence_cut(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end) {
    std::size_t best = 0;
    for (std::size_t i = begin; i + 1 < end; ++i) {
        if ((cps[i] == U'.' || cps[i] == U'?' || cps[i] == U'!') && is_space(cps[i + 1])) best = i + 2;
    }
    return best;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string render_instruction(std::string_view tmpl, std::string_view fragment) {
    constexpr std::string_view placeholder = "{fragment}";
    std::string out;
    std::size_t pos = 0;
    for (;;) {
        const auto hit = tmpl.find(placeholder, pos);
        out.append(tmpl.substr(pos, hit - pos));
        if (hit == std::string_view::npos) break;
        out.append(fragment);
        pos = hit + placeholder.size();
    }
    return out;
}

}  // namespace

std::vector<Fragment> fragment_document(const corpus::ThesisRecord& record,
                                        std::size_t max_fragment_chars) {
    if (max_fragment_chars < kMinFragmentChars) {
        throw ValidationError("max_fragment_chars must be at least " + std::to_string(kMinFragmentChars));
    }
    std::vector<Fragment> out;
    const std::string& text = record.raw_content;
    if (text.empty()) return out;

    const auto cps = utf8::decode(text);
    const auto bytes = utf8::boundaries(text);
    const std::size_t n = cps.size();

    std::size_t begin = 0;
    while (begin < n) {
        std::size_t cut = n;
        if (n - begin > max_fragment_chars) {
            const std::size_t end = begin + max_fragment_chars;
            cut = last_paragraph_cut(cps, begin, end);
            if (cut == 0) cut = last_sentence_cut(cps, begin, end);
            if (cut == 0) cut = end;
        }
        out.push_back({record.uri, out.size(), text.substr(bytes[begin], bytes[cut] - bytes[begin])});
        begin = cut;
    }
    return out;
}

ParsedPairs parse_generator_output(std::string_view reply, std::string_view fragment_text) {
    ParsedPairs out;
    std::size_t pos = 0;
    while (pos <= reply.size()) {
        const auto eol = reply.find('\n', pos);
        const auto line = trim(reply.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        pos = eol == std::string_view::npos ? reply.size() + 1 : eol + 1;
        if (line.empty()) continue;

        const auto tab = line.find('\t');
        if (!line.starts_with("Q:") || tab == std::string_view::npos) {
            ++out.skipped;
            continue;
        }
        const auto question = trim(line.substr(2, tab - 2));
        auto rest = trim(line.substr(tab + 1));
        if (!rest.starts_with("A:")) {
            ++out.skipped;
            continue;
        }
        const auto answer = trim(rest.substr(2));
        if (question.empty() || answer.empty()) {
            ++out.skipped;
            continue;
        }
        out.pairs.push_back({std::string(question), std::string(answer), std::string(fragment_text)});
    }
    return out;
}

ParsedPairs generate_qa(const Fragment& fragment, llm::ChatEndpoint& generator,
                        std::string_view instruction_template, llm::ChatRequest settings) {
    if (instruction_template.find("{fragment}") == std::string_view::npos) {
        throw ValidationError("instruction template must contain a {fragment} placeholder");
    }
    auto request = std::move(settings);
    request.messages.clear();
    request.messages.push_back({llm::Role::User, render_instruction(instruction_template, fragment.text)});
    const auto response = generator.complete(request);
    auto parsed = parse_generator_output(response.content, fragment.text);
    if (parsed.skipped > 0) {
        spdlog::warn("fragment {}#{}: skipped {} unparseable generator line(s)", fragment.source_uri,
                     fragment.ordinal, parsed.skipped);
    }
    return parsed;
}

GenerationReport generate_all(const std::vector<Fragment>& fragments, llm::ChatEndpoint& generator,
                              std::string_view instruction_template, std::size_t parallelism,
                              const llm::ChatRequest& settings) {
    if (instruction_template.find("{fragment}") == std::string_view::npos) {
        throw ValidationError("instruction template must contain a {fragment} placeholder");
    }
    struct Slot {
        ParsedPairs parsed;
        bool failed = false;
    };
    std::vector<Slot> slots(fragments.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < fragments.size(); i = next++) {
            try {
                slots[i].parsed = generate_qa(fragments[i], generator, instruction_template, settings);
            } catch (const Error& e) {
                spdlog::error("fragment {}#{}: {}", fragments[i].source_uri, fragments[i].ordinal, e.what());
                slots[i].failed = true;
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(1, fragments.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    std::vector<std::size_t> order(fragments.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& fa = fragments[a];
        const auto& fb = fragments[b];
        return std::tie(fa.source_uri, fa.ordinal) < std::tie(fb.source_uri, fb.ordinal);
    });

    GenerationReport report;
    for (const auto i : order) {
        auto& slot = slots[i];
        if (slot.failed) {
            ++report.failed_fragments;
            continue;
        }
        report.skipped_lines += slot.parsed.skipped;
        for (auto& p : slot.parsed.pairs) report.pairs.push_back(std::move(p));
    }
    return report;
}

SplitDataset split_dataset(const std::vector<QaPair>& pairs, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must be in (0, 1)");
    SplitDataset out;
    out.seed = seed;
    out.ratio = ratio;
    if (pairs.empty()) {
        spdlog::warn("splitting an empty QA dataset");
        return out;
    }
    std::vector<QaPair> shuffled = pairs;
    Xoshiro256 rng(seed);
    shuffle(std::span<QaPair>(shuffled), rng);
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(pairs.size())));
    out.train.assign(std::make_move_iterator(shuffled.begin()),
                     std::make_move_iterator(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train)));
    out.test.assign(std::make_move_iterator(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train)),
                    std::make_move_iterator(shuffled.end()));
    return out;
}

LengthAverages qa_stats(const std::vector<QaPair>& pairs) {
    if (pairs.empty()) throw ValidationError("qa_stats needs at least one pair");
    std::size_t prompt_total = 0;
    std::size_t completion_total = 0;
    for (const auto& p : pairs) {
        prompt_total += utf8::length(p.prompt);
        completion_total += utf8::length(p.completion);
    }
    const std::size_t n = pairs.size();
    // floor(total / n + 1/2) in integers.
    return {(2 * prompt_total + n) / (2 * n), (2 * completion_total + n) / (2 * n)};
}

std::string pairs_to_json(const std::vector<QaPair>& pairs) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& p : pairs) {
        out.push_back({{"prompt", p.prompt}, {"completion", p.completion}, {"fragment", p.fragment}});
    }
    return out.dump(2) + "\n";
}

std::vector<QaPair> pairs_from_json(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed QA dataset: ") + e.what(), e.byte);
    }
    if (!doc.is_array()) throw ParseError("QA dataset must be a JSON array", 0);
    std::vector<QaPair> out;
    out.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object()) throw ValidationError("QA dataset entries must be objects");
        QaPair p;
        try {
            p.prompt = item.at("prompt").get<std::string>();
            p.completion = item.at("completion").get<std::string>();
            p.fragment = item.at("fragment").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("QA dataset entry: ") + e.what());
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<QaPair> load_pairs(const std::filesystem::path& path) {
    return pairs_from_json(io::read_file(path));
}

void save_pairs(const std::vector<QaPair>& pairs, const std::filesystem::path& path) {
    io::write_file(path, pairs_to_json(pairs));
}

std::string fragments_to_json(const std::vector<Fragment>& fragments) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& f : fragments) {
        out.push_back({{"source_uri", f.source_uri}, {"ordinal", f.ordinal}, {"text", f.text}});
    }
    return out.dump(2) + "\n";
}

std::vector<Fragment> fragments_from_json(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed fragments file: ") + e.what(), e.byte);
    }
    if (!doc.is_array()) throw ParseError("fragments file must be a JSON array", 0);
    std::vector<Fragment> out;
    for (const auto& item : doc) {
        try {
            out.push_back({item.at("source_uri").get<std::string>(), item.at("ordinal").get<std::size_t>(),
                           item.at("text").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("fragment entry: ") + e.what());
        }
    }
    return out;
}

void save_split(const SplitDataset& split, const std::filesystem::path& dir) {
    save_pairs(split.train, dir / "train.json");
    save_pairs(split.test, dir / "test.json");
    nlohmann::ordered_json meta{
        {"seed", split.seed},
        {"ratio", split.ratio},
        {"train", split.train.size()},
        {"test", split.test.size()},
        {"prng", "xoshiro256** seeded by splitmix64; Fisher-Yates from the back"},
    };
    io::write_file(dir / "split.json", meta.dump(2) + "\n");
}

}  // namespace ragwb::qa
