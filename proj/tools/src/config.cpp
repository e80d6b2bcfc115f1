#include "spde_mlmc_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "spde_mlmc/error.hpp"
#include "spde_mlmc/metrics.hpp"

namespace spde_mlmc::cli {

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw UsageError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::vector<int> LevelRange::levels() const {
    std::vector<int> out;
    for (int l = first; l <= last; ++l) out.push_back(l);
    return out;
}

std::string LevelRange::str() const {
    return first == last ? std::to_string(first) : std::to_string(first) + ".." + std::to_string(last);
}

LevelRange parse_level_range(std::string_view text, int lo, int hi) {
    text = trim(text);
    LevelRange r;
    const std::size_t dots = text.find("..");
    if (dots == std::string_view::npos) {
        r.first = r.last = parse_number<int>(text, "level");
    } else {
        r.first = parse_number<int>(text.substr(0, dots), "level range");
        r.last = parse_number<int>(text.substr(dots + 2), "level range");
    }
    if (r.first > r.last) throw UsageError("level range '" + std::string(text) + "' is empty");
    if (r.first < lo) throw UsageError("level range '" + std::string(text) + "' starts below " + std::to_string(lo));
    if (r.last > hi) {
        throw CapacityError("level range '" + std::string(text) + "' exceeds the maximum level " + std::to_string(hi));
    }
    return r;
}

std::string_view to_string(Command c) {
    switch (c) {
        case Command::DetConv: return "det-conv";
        case Command::Variance: return "variance";
        case Command::Run: return "run";
        case Command::Compare: return "compare";
    }
    return "unknown";
}

TruncationRule parse_truncation(std::string_view text) {
    text = trim(text);
    if (text == "dofs") return TruncationRule::match_dofs();
    if (text.starts_with("fixed:")) {
        const auto j = parse_number<std::size_t>(text.substr(6), "mode count");
        if (j == 0) throw UsageError("truncation: fixed mode count must be positive");
        return TruncationRule::fixed(j);
    }
    throw UsageError("truncation must be 'dofs' or 'fixed:J', got '" + std::string(text) + "'");
}

std::string to_string(const TruncationRule& rule) {
    return rule.kind == TruncationRule::Kind::MatchDofs ? "dofs" : "fixed:" + std::to_string(rule.fixed_modes);
}

std::vector<ScheduleMode> parse_modes(std::string_view text) {
    std::vector<ScheduleMode> modes;
    for (std::string_view part : split(text, ',')) {
        const ScheduleMode m = parse_schedule_mode(part);
        if (std::find(modes.begin(), modes.end(), m) != modes.end()) {
            throw UsageError("mode '" + std::string(part) + "' listed twice");
        }
        modes.push_back(m);
    }
    return modes;
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> values;
    for (std::string_view part : split(text, ',')) values.push_back(parse_number<double>(part, "real"));
    return values;
}

std::string format_real(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw UsageError("format_real: conversion failed");
    return std::string(buf, ptr);
}

void RunConfig::validate() const {
    if (!seed) throw UsageError("--seed is mandatory");
    if (workers == 0) throw UsageError("--workers must be positive");
    if (min_level < 1) throw UsageError("--min-level must be >= 1");
    if (!(spectrum_decay > -1.0) || !std::isfinite(spectrum_decay)) throw UsageError("--spectrum-decay must exceed -1");
    if (!std::isfinite(drift)) throw UsageError("--drift must be finite");

    switch (command) {
        case Command::DetConv: break;
        case Command::Variance:
            if (pairs < 2) throw UsageError("--pairs must be >= 2");
            if (levels.first <= min_level) {
                throw UsageError("variance levels must lie above --min-level so every level has a coarse partner");
            }
            break;
        case Command::Run:
        case Command::Compare: {
            if (reps == 0) throw UsageError("--reps must be positive");
            if (modes.empty()) throw UsageError("no schedule mode selected");
            if (command == Command::Compare) {
                const std::set<ScheduleMode> got(modes.begin(), modes.end());
                if (got != std::set<ScheduleMode>{ScheduleMode::Weak, ScheduleMode::Strong}) {
                    throw UsageError("compare needs exactly the weak and strong modes");
                }
            }
            const int lowest = std::min(top_levels.first, command == Command::Compare ? strong_levels.first : 99);
            if (min_level > lowest) throw UsageError("--min-level exceeds the smallest top level");
            if (!general_sequence.empty()) {
                if (general_sequence.size() < static_cast<std::size_t>(top_levels.last) + 1) {
                    throw UsageError("--a-seq needs at least L+1 values for the largest L");
                }
            }
            // Surface schedule errors (gamma, eps, sequences) before any sampling.
            for (ScheduleMode mode : modes) {
                const LevelRange& range =
                    command == Command::Compare && mode == ScheduleMode::Strong ? strong_levels : top_levels;
                (void)build_schedule(mode, range.last, schedule_params(mode, range.last));
            }
            if (m != 0) {
                const int top = std::max(top_levels.last, command == Command::Compare ? strong_levels.last : 0);
                if (m < 2 || ((m - 1) & (m - 2)) != 0 || reference_grid_size(top, 0) > m) {
                    throw UsageError("--m must be 2^r + 1 with r >= the largest L");
                }
            }
            break;
        }
    }
}

ScheduleParams RunConfig::schedule_params(ScheduleMode mode, int top_level) const {
    ScheduleParams p;
    p.gamma = gamma;
    p.eps = eps;
    p.constant = constant;
    if (mode == ScheduleMode::General) {
        if (general_sequence.empty()) {
            p.general = GeneralSequence::geometric(top_level, general_rate, general_eta);
        } else {
            if (general_sequence.size() < static_cast<std::size_t>(top_level) + 1) {
                throw UsageError("--a-seq needs at least L+1 values");
            }
            GeneralSequence seq;
            seq.eta = general_eta;
            seq.a.assign(general_sequence.begin(), general_sequence.begin() + top_level + 1);
            p.general = seq;
        }
    }
    return p;
}

SamplerOptions RunConfig::sampler_options() const {
    SamplerOptions o;
    if (drift != 0.0) {
        const double c = drift;
        o.drift = DriftSpec{[c](double u) { return c * std::sin(u); }};
    }
    o.truncation = truncation;
    o.spectrum = NoiseSpectrum{spectrum_decay};
    o.zero_noise = zero_noise;
    return o;
}

FunctionalSpec RunConfig::functional_spec() const {
    return functional == FunctionalSpec::Kind::SquaredNorm ? FunctionalSpec::squared_norm()
                                                           : FunctionalSpec::identity();
}

std::vector<std::pair<std::string, std::string>> RunConfig::canonical() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("command", std::string(to_string(command)));
    kv.emplace_back("seed", seed ? std::to_string(*seed) : "");
    kv.emplace_back("min_level", std::to_string(min_level));
    kv.emplace_back("truncation", to_string(truncation));
    kv.emplace_back("spectrum_decay", format_real(spectrum_decay));
    kv.emplace_back("drift", format_real(drift));
    kv.emplace_back("zero_noise", zero_noise ? "true" : "false");
    switch (command) {
        case Command::DetConv: kv.emplace_back("levels", levels.str()); break;
        case Command::Variance:
            kv.emplace_back("levels", levels.str());
            kv.emplace_back("pairs", std::to_string(pairs));
            kv.emplace_back("functional", functional == FunctionalSpec::Kind::SquaredNorm ? "sqnorm" : "identity");
            break;
        case Command::Run:
        case Command::Compare: {
            kv.emplace_back("L", top_levels.str());
            if (command == Command::Compare) kv.emplace_back("strong_L", strong_levels.str());
            std::string ms;
            for (ScheduleMode mode : modes) ms += (ms.empty() ? "" : ",") + std::string(spde_mlmc::to_string(mode));
            kv.emplace_back("modes", ms);
            kv.emplace_back("gamma", format_real(gamma));
            kv.emplace_back("eps", format_real(eps));
            kv.emplace_back("constant", format_real(constant));
            kv.emplace_back("base_count", std::string(spde_mlmc::to_string(base_count)));
            kv.emplace_back("reps", std::to_string(reps));
            kv.emplace_back("functional", functional == FunctionalSpec::Kind::SquaredNorm ? "sqnorm" : "identity");
            kv.emplace_back("m", m == 0 ? "auto" : std::to_string(m));
            if (std::find(modes.begin(), modes.end(), ScheduleMode::General) != modes.end()) {
                std::string seq;
                for (double a : general_sequence) seq += (seq.empty() ? "" : ",") + format_real(a);
                kv.emplace_back("a_seq", seq);
                kv.emplace_back("rate", format_real(general_rate));
                kv.emplace_back("eta", format_real(general_eta));
            }
            break;
        }
    }
    std::sort(kv.begin(), kv.end());
    return kv;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [k, v] : canonical()) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace spde_mlmc::cli
