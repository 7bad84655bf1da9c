#include "emp/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace emp::io {
namespace {

constexpr std::string_view kBase64Alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

bool is_separator(char c) { return c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c)); }

double parse_number(std::string_view token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError("not a number: '" + std::string(token) + "'");
    return value;
}

std::vector<double> numbers_from_json_array(const nlohmann::json& arr) {
    if (!arr.is_array()) throw ParseError("expected a JSON array of numbers");
    std::vector<double> values;
    values.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw ParseError("score arrays may only contain numbers");
        values.push_back(v.get<double>());
    }
    return values;
}

}  // namespace

ScoreVector parse_scores_csv(std::string_view text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && is_separator(line[i])) ++i;
            std::size_t j = i;
            while (j < line.size() && !is_separator(line[j])) ++j;
            if (j > i) values.push_back(parse_number(line.substr(i, j - i)));
            i = j;
        }
    }
    if (values.empty()) throw ParseError("no scores found");
    return ScoreVector(std::move(values));
}

ScoreVector parse_scores_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (j.is_object()) {
        if (!j.contains("scores")) throw ParseError("JSON object has no \"scores\" field");
        j = j.at("scores");
    }
    std::vector<double> values = numbers_from_json_array(j);
    if (values.empty()) throw ParseError("no scores found");
    return ScoreVector(std::move(values));
}

ScoreVector load_scores(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = path.extension() == ".json" ||
                      (first != std::string::npos && (text[first] == '[' || text[first] == '{'));
    return json ? parse_scores_json(text) : parse_scores_csv(text);
}

Partition parse_partition_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid partition JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("groups")) j = j.at("groups");
    if (!j.is_array()) throw ParseError("partition must be a JSON list of index arrays");
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& g : j) {
        if (!g.is_array()) throw ParseError("each partition group must be an array");
        std::vector<std::size_t> group;
        for (const auto& idx : g) {
            if (!idx.is_number_unsigned()) throw ParseError("partition indices must be nonnegative integers");
            group.push_back(idx.get<std::size_t>());
        }
        groups.push_back(std::move(group));
    }
    return Partition(std::move(groups));
}

Partition load_partition(const std::filesystem::path& path) { return parse_partition_json(read_file(path)); }

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += kBase64Alphabet[(v >> 6) & 63];
        out += kBase64Alphabet[v & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = bytes[i] << 16;
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += kBase64Alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) throw ParseError("base64 length must be a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t v = 0;
        int padding = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const char c = text[i + k];
            std::uint32_t sextet = 0;
            if (c == '=') {
                if (i + 4 != text.size() || k < 2) throw ParseError("misplaced base64 padding");
                ++padding;
            } else {
                if (padding > 0) throw ParseError("misplaced base64 padding");
                const auto pos = kBase64Alphabet.find(c);
                if (pos == std::string_view::npos) throw ParseError("invalid base64 character");
                sextet = static_cast<std::uint32_t>(pos);
            }
            v = (v << 6) | sextet;
        }
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        if (padding < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
        if (padding < 1) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    return out;
}

std::vector<std::uint8_t> pack_mask(const std::vector<bool>& mask) {
    std::vector<std::uint8_t> bytes((mask.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    return bytes;
}

std::vector<bool> unpack_mask(std::span<const std::uint8_t> bytes, std::size_t n) {
    if (bytes.size() != (n + 7) / 8) throw ParseError("packed mask has the wrong byte count");
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = (bytes[i / 8] >> (i % 8)) & 1u;
    return mask;
}

nlohmann::json to_json(const EmpDecision& d) {
    return {
        {"n", d.size()},
        {"n_eff", d.n_eff},
        {"beta", d.beta},
        {"keep_count", d.keep_count},
        {"s_eff", d.s_eff},
        {"sparsity", d.sparsity()},
        {"kept_indices", d.kept_indices},
        {"mask", base64_encode(pack_mask(d.mask))},
    };
}

nlohmann::json to_json(const PartitionedDecision& d) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : d.decisions) groups.push_back(g ? to_json(*g) : nlohmann::json(nullptr));
    return {
        {"n", d.mask.size()},
        {"keep_count", d.keep_count},
        {"sparsity", d.sparsity()},
        {"kept_indices", d.kept_indices},
        {"mask", base64_encode(pack_mask(d.mask))},
        {"groups", std::move(groups)},
    };
}

nlohmann::json to_json(const bounds::BoundReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {
        {"n", r.n},
        {"nu", r.nu},
        {"trivial_bound", r.trivial_bound},
        {"tight_bound", r.tight_bound},
        {"approx_bound", opt(r.approx_bound)},
        {"observed_s_eff", opt(r.observed_s_eff)},
        {"slack", opt(r.slack)},
    };
}

EmpDecision decision_from_json(const nlohmann::json& j) {
    try {
        EmpDecision d;
        const auto n = j.at("n").get<std::size_t>();
        d.n_eff = j.at("n_eff").get<std::size_t>();
        d.beta = j.at("beta").get<double>();
        d.keep_count = j.at("keep_count").get<std::size_t>();
        d.s_eff = j.at("s_eff").get<double>();
        d.kept_indices = j.at("kept_indices").get<std::vector<std::size_t>>();
        d.mask = unpack_mask(base64_decode(j.at("mask").get<std::string>()), n);
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed decision JSON: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    const std::filesystem::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

}  // namespace emp::io
