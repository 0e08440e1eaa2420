// plastore: build, query and measure succinct PLA containers from the shell.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include <plastore/bounds.hpp>
#include <plastore/oracle.hpp>
#include <plastore/pla_builder.hpp>
#include <plastore/store_compression.hpp>
#include <plastore/store_indexing.hpp>

using namespace plastore;

namespace {

struct ingestion_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InputFormat { text, u64le };

std::vector<uint8_t> read_bytes(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw io_error("read failed on " + path);
    return bytes;
}

void write_bytes(const std::string &path, const std::vector<uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out)
        throw io_error("write failed on " + path);
}

/// Integers of a text (one per line, blank lines skipped) or u64le file.
/// Errors name the line (text) or record (u64le).
std::vector<uint64_t> read_integers(const std::string &path, InputFormat fmt, std::vector<uint64_t> *where = nullptr) {
    const auto bytes = read_bytes(path);
    std::vector<uint64_t> out;
    if (fmt == InputFormat::u64le) {
        if (bytes.size() % 8 != 0)
            throw ingestion_error(path + ": size " + std::to_string(bytes.size()) + " is not a multiple of 8");
        for (size_t i = 0; i < bytes.size(); i += 8) {
            uint64_t v = 0;
            for (int b = 7; b >= 0; --b)
                v = (v << 8) | bytes[i + static_cast<size_t>(b)];
            out.push_back(v);
            if (where)
                where->push_back(i / 8 + 1);
        }
        return out;
    }
    const std::string_view text(reinterpret_cast<const char *>(bytes.data()), bytes.size());
    uint64_t line = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        const size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view s = text.substr(pos, end - pos);
        pos = end + 1;
        ++line;
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        if (s.empty())
            continue;
        uint64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ingestion_error(path + ": line " + std::to_string(line) + ": not a non-negative integer: '" +
                                  std::string(s.substr(0, 40)) + "'");
        out.push_back(v);
        if (where)
            where->push_back(line);
    }
    return out;
}

/// The input sequence of build/verify/stats: strictly increasing values in [1, 2^60].
std::vector<uint64_t> read_sequence(const std::string &path, InputFormat fmt) {
    std::vector<uint64_t> where;
    auto v = read_integers(path, fmt, &where);
    if (v.empty())
        throw degenerate_input_error(path + ": no values");
    const std::string unit = fmt == InputFormat::text ? "line " : "record ";
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 1 || v[i] > max_value)
            throw ingestion_error(path + ": " + unit + std::to_string(where[i]) + ": value " + std::to_string(v[i]) +
                                  " outside [1, 2^60]");
        if (i > 0 && v[i] <= v[i - 1])
            throw ingestion_error(path + ": " + unit + std::to_string(where[i]) + ": value " + std::to_string(v[i]) +
                                  " not greater than the previous value " + std::to_string(v[i - 1]));
    }
    return v;
}

using Container = std::variant<CompressedPlaC, CompressedPlaI>;

Container load(const std::string &path) {
    const auto bytes = read_bytes(path);
    if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, CompressedPlaC::magic.begin()))
        return CompressedPlaC::deserialize(bytes);
    if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, CompressedPlaI::magic.begin()))
        return CompressedPlaI::deserialize(bytes);
    throw format_error(path + ": not a PLAC or PLAI container");
}

Setting setting_of(const Container &c) {
    return std::holds_alternative<CompressedPlaC>(c) ? Setting::compression : Setting::indexing;
}

const StoreHeader &header_of(const Container &c) {
    return std::visit([](const auto &s) -> const StoreHeader & { return s.header(); }, c);
}

BitBudget budget_of(const Container &c) {
    return std::visit([](const auto &s) { return s.size_bits(); }, c);
}

void warn_directory(const Container &c) {
    const auto *ci = std::get_if<CompressedPlaI>(&c);
    if (!ci || ci->mode() != Mode::rs)
        return;
    const BitBudget b = ci->size_bits();
    if (2 * b.x > b.structure_bits())
        std::cerr << "warning: rs-mode key bit vector takes " << b.x << " of " << b.structure_bits()
                  << " structure bits; ef mode stores sparse keys in less space\n";
}

/// y_1..y_ℓ (compression) or x_1..x_ℓ (indexing), decoded from the container.
std::vector<uint64_t> firsts_of(const Container &c) {
    std::vector<uint64_t> out;
    if (const auto *cc = std::get_if<CompressedPlaC>(&c)) {
        for (uint64_t i = 1; i <= cc->size(); ++i)
            out.push_back(static_cast<uint64_t>(cc->decode_segment(i).first_y));
    } else {
        const auto &ci = std::get<CompressedPlaI>(c);
        for (uint64_t i = 1; i <= ci.size(); ++i)
            out.push_back(static_cast<uint64_t>(ci.first_x(i)));
    }
    return out;
}

void check_input_matches(const Container &c, const std::vector<uint64_t> &v) {
    const StoreHeader &h = header_of(c);
    const bool comp = setting_of(c) == Setting::compression;
    if (v.size() != h.n)
        throw validation_error("input has " + std::to_string(v.size()) + " values, container was built from " +
                               std::to_string(h.n));
    if (comp ? v.back() != h.u : v.back() > h.u)
        throw validation_error("input values disagree with the container universe " + std::to_string(h.u));
}

InputFormat parse_format(const std::string &s) { return s == "u64le" ? InputFormat::u64le : InputFormat::text; }

struct Opts {
    std::string setting = "compression";
    uint64_t epsilon = 0;
    std::string mode = "ef";
    std::string input, output, container, format = "text", report = "text", batch;
    uint64_t universe = 0;
    std::optional<int64_t> x;
    unsigned threads = 0;
    uint64_t ell = 0, u = 0, n = 0, budget = default_enum_budget;
    std::string y_file, x_file;
    double c = 2.0;
};

int cmd_build(const Opts &o) {
    const Setting st = parse_setting(o.setting);
    const Mode mode = parse_mode(o.mode);
    if (o.epsilon < 1)
        throw validation_error("epsilon must be at least 1");
    const auto v = read_sequence(o.input, parse_format(o.format));
    if (st == Setting::compression && o.universe != 0 && o.universe != v.back())
        throw validation_error("--universe applies to the indexing setting; compression takes u from the last value");
    const PointSeq pts(v, st == Setting::indexing ? o.universe : 0, st);
    const Pla pla = build_optimal_pla(pts, o.epsilon);
    Container c;
    if (st == Setting::compression)
        c = encode_c(pla, pts, mode);
    else
        c = encode_i(pla, pts, mode);
    const auto bytes = std::visit([](const auto &s) { return s.serialize(); }, c);
    write_bytes(o.output, bytes);
    const BitBudget b = budget_of(c);
    std::cout << "setting=" << to_string(st) << "\nmode=" << to_string(mode) << "\nn=" << pla.n << "\nu=" << pla.u
              << "\nell=" << pla.size() << "\nepsilon=" << pla.epsilon << "\nepsilon_eff=" << pla.epsilon_eff
              << "\nstructure_bits=" << b.structure_bits() << "\ntotal_bits=" << b.total_bits() << '\n';
    warn_directory(c);
    return 0;
}

int cmd_predict(const Opts &o) {
    const Container c = load(o.container);
    auto query = [&](int64_t x, uint64_t &seg) {
        return std::visit(
            [&](const auto &s) {
                seg = s.segment_of(x);
                return predict_segment(s.decode_segment(seg), x);
            },
            c);
    };
    if (o.batch.empty()) {
        if (!o.x)
            throw validation_error("predict needs --x or --batch");
        uint64_t seg = 0;
        const int64_t v = query(*o.x, seg);
        std::cout << "x=" << *o.x << " predict=" << v << " segment=" << seg << '\n';
        return 0;
    }
    const auto raw = read_integers(o.batch, InputFormat::text);
    const size_t m = raw.size();
    std::vector<int64_t> vals(m);
    std::vector<uint64_t> segs(m);
    std::vector<std::string> errors(m);
    unsigned t = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<size_t>(t, std::max<size_t>(m / 1024, 1)));
    // workers share the immutable container and write disjoint slices
    auto work = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            try {
                vals[i] = query(static_cast<int64_t>(raw[i]), segs[i]);
            } catch (const range_error &e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < t; ++k)
        pool.emplace_back(work, m * k / t, m * (k + 1) / t);
    for (auto &th : pool)
        th.join();
    for (size_t i = 0; i < m; ++i)
        if (!errors[i].empty())
            throw range_error(errors[i]);
    std::string out;
    for (size_t i = 0; i < m; ++i)
        out += "x=" + std::to_string(raw[i]) + " predict=" + std::to_string(vals[i]) +
               " segment=" + std::to_string(segs[i]) + '\n';
    std::cout << out;
    return 0;
}

int cmd_stats(const Opts &o) {
    const Container c = load(o.container);
    const StoreHeader &h = header_of(c);
    const auto firsts = firsts_of(c);
    if (!o.input.empty()) {
        const auto v = read_sequence(o.input, parse_format(o.format));
        check_input_matches(c, v);
        for (uint64_t i = 0; i < firsts.size(); ++i) {
            // compression stores y_i = value at x_i; indexing stores x_i = key at rank y_i
            const bool ok = std::visit(
                [&](const auto &s) {
                    const Segment g = s.decode_segment(i + 1);
                    return setting_of(c) == Setting::compression
                               ? v[static_cast<size_t>(g.first_x) - 1] == firsts[i]
                               : v[static_cast<size_t>(g.first_y) - 1] == firsts[i];
                },
                c);
            if (!ok)
                throw validation_error("segment " + std::to_string(i + 1) + " does not start on the input sequence");
        }
    }
    const BoundParams p{h.ell, h.epsilon, h.epsilon_eff, h.u, h.n, firsts};
    const BoundReport r = redundancy_report(budget_of(c), p, setting_of(c), o.c);
    if (o.report == "json")
        std::cout << to_json(r).dump(2) << '\n';
    else
        std::cout << "mode=" << to_string(std::visit([](const auto &s) { return s.mode(); }, c)) << '\n'
                  << to_text(r);
    warn_directory(c);
    return 0;
}

int cmd_verify(const Opts &o) {
    const Container c = load(o.container);
    const auto v = read_sequence(o.input, parse_format(o.format));
    check_input_matches(c, v);
    const StoreHeader &h = header_of(c);
    const bool comp = setting_of(c) == Setting::compression;
    const auto eps = static_cast<int64_t>(h.epsilon_eff);
    uint64_t bad = 0;
    std::string listing;
    for (uint64_t i = 1; i <= v.size(); ++i) {
        const int64_t x = comp ? static_cast<int64_t>(i) : static_cast<int64_t>(v[i - 1]);
        const int64_t truth = comp ? static_cast<int64_t>(v[i - 1]) : static_cast<int64_t>(i);
        int64_t pred = 0;
        try {
            pred = std::visit([&](const auto &s) { return s.predict(x); }, c);
        } catch (const range_error &) {
            pred = truth + eps + 1;  // an uncovered key fails the contract
        }
        if (std::llabs(pred - truth) > eps) {
            if (++bad <= 100)
                listing += "violation " + std::string(comp ? "position=" : "key=") + std::to_string(x) +
                           " predict=" + std::to_string(pred) + " truth=" + std::to_string(truth) + '\n';
        }
    }
    std::cout << listing;
    std::cout << "checked=" << v.size() << " violations=" << bad << " epsilon_eff=" << eps << '\n';
    if (bad) {
        std::cerr << "error: verify: " << bad << " of " << v.size() << " points exceed epsilon_eff=" << eps << '\n';
        return 1;
    }
    return 0;
}

std::vector<uint64_t> firsts_from_flags(const Opts &o, Setting st) {
    const std::string &path = st == Setting::compression ? o.y_file : o.x_file;
    if (path.empty())
        return {};
    return read_integers(path, InputFormat::text);
}

int cmd_bounds(const Opts &o) {
    const Setting st = parse_setting(o.setting);
    const auto f = firsts_from_flags(o, st);
    std::ostringstream out;
    out.precision(10);
    if (st == Setting::compression) {
        if (f.empty())
            throw validation_error("compression bounds need --y-file");
        const BigCount given = count_c_given_y(o.ell, o.epsilon, o.u, o.n, f);
        const BigCount full = count_c(o.ell, o.epsilon, o.u, o.n, f);
        out << "count=" << full.str() << "\nlog2_count=" << full.log2() << "\nconditional_count=" << given.str()
            << "\nlog2_conditional_count=" << given.log2()
            << "\nlower_bound_bits=" << lower_bound_c(o.ell, o.epsilon, o.u, o.n, f) << "\nbaseline_la_bits="
            << baseline_la_bits(o.ell, o.epsilon, o.u, o.n, BaselineVariant::binary_search, o.c)
            << "\nbaseline_la_const_bits="
            << baseline_la_bits(o.ell, o.epsilon, o.u, o.n, BaselineVariant::constant_time, o.c) << '\n';
    } else {
        const BigCount general = count_i_general(o.ell, o.epsilon, o.u, o.n);
        if (!f.empty()) {
            const BigCount given = count_i_given_x(o.ell, o.epsilon, o.u, o.n, f);
            const BigCount full = count_i(o.ell, o.epsilon, o.u, o.n, f);
            out << "count=" << full.str() << "\nlog2_count=" << full.log2() << "\nconditional_count=" << given.str()
                << "\nlog2_conditional_count=" << given.log2() << '\n';
            // the bound is undefined on an empty class; report the counts anyway
            if (!full.is_zero())
                out << "lower_bound_bits=" << lower_bound_i(o.ell, o.epsilon, o.u, o.n, f) << '\n';
        }
        out << "general_count=" << general.str() << "\nlog2_general_count=" << general.log2()
            << "\nbaseline_pgm_bits="
            << baseline_pgm_bits(o.ell, o.epsilon, o.u, o.n, BaselineVariant::binary_search, o.c)
            << "\nbaseline_pgm_const_bits="
            << baseline_pgm_bits(o.ell, o.epsilon, o.u, o.n, BaselineVariant::constant_time, o.c) << '\n';
    }
    std::cout << out.str();
    return 0;
}

int cmd_oracle_count(const Opts &o) {
    const Setting st = parse_setting(o.setting);
    const auto f = firsts_from_flags(o, st);
    if (f.empty())
        throw validation_error(std::string("oracle-count needs --") + (st == Setting::compression ? "y" : "x") +
                               "-file");
    const EnumSpec spec{o.ell, o.epsilon, o.u, o.n, f, o.budget};
    const bool comp = st == Setting::compression;
    const BigCount enumerated = comp ? enumerate_pla_c(spec) : enumerate_pla_i(spec);
    const BigCount given = comp ? count_c_given_y(o.ell, o.epsilon, o.u, o.n, f)
                                : count_i_given_x(o.ell, o.epsilon, o.u, o.n, f);
    const BigCount full = comp ? count_c(o.ell, o.epsilon, o.u, o.n, f) : count_i(o.ell, o.epsilon, o.u, o.n, f);
    const bool agree = enumerated == given;
    std::cout << "enumerated=" << enumerated.str() << "\nconditional_formula=" << given.str()
              << "\nagree=" << (agree ? "yes" : "no") << "\nfull_formula=" << full.str() << '\n';
    if (!agree) {
        std::cerr << "error: oracle: enumeration " << enumerated.str() << " differs from the conditional formula "
                  << given.str() << '\n';
        return 1;
    }
    return 0;
}

int run(int argc, char **argv) {
    CLI::App app{"Succinct storage for error-bounded piecewise linear approximations"};
    app.require_subcommand(1);
    Opts o;
    const std::vector<std::string> settings{"compression", "indexing", "c", "i"};

    auto *build = app.add_subcommand("build", "Build a container from a sorted integer sequence");
    build->add_option("--setting", o.setting)->check(CLI::IsMember(settings));
    build->add_option("--epsilon", o.epsilon)->required();
    build->add_option("--mode", o.mode)->check(CLI::IsMember({"ef", "rs"}));
    build->add_option("--input", o.input)->required();
    build->add_option("--output", o.output)->required();
    build->add_option("--universe", o.universe, "indexing universe (default: largest key)");
    build->add_option("--format", o.format)->check(CLI::IsMember({"text", "u64le"}));

    auto *predict = app.add_subcommand("predict", "Predict at one abscissa or at every value of a batch file");
    predict->add_option("container", o.container)->required();
    predict->add_option("--x", o.x);
    predict->add_option("--batch", o.batch, "text file of abscissae, one per line");
    predict->add_option("--threads", o.threads, "batch worker threads (default: hardware)");

    auto *stats = app.add_subcommand("stats", "Per-component bits, lower bound, redundancy and baselines");
    stats->add_option("container", o.container)->required();
    stats->add_option("--input", o.input, "original sequence, cross-checked against the container");
    stats->add_option("--format", o.format)->check(CLI::IsMember({"text", "u64le"}));
    stats->add_option("--report", o.report)->check(CLI::IsMember({"text", "json"}));
    stats->add_option("--c", o.c, "exponent of the constant-time baselines");

    auto *verify = app.add_subcommand("verify", "Check the error contract at every input point");
    verify->add_option("container", o.container)->required();
    verify->add_option("--input", o.input)->required();
    verify->add_option("--format", o.format)->check(CLI::IsMember({"text", "u64le"}));

    auto *bounds = app.add_subcommand("bounds", "Evaluate the counting formulas and bounds");
    auto *oracle = app.add_subcommand("oracle-count", "Enumerate PLAs and compare with the conditional formula");
    for (auto *sub : {bounds, oracle}) {
        sub->add_option("--setting", o.setting)->required()->check(CLI::IsMember(settings));
        sub->add_option("--ell", o.ell)->required();
        sub->add_option("--epsilon", o.epsilon)->required();
        sub->add_option("--u", o.u)->required();
        sub->add_option("--n", o.n)->required();
        auto *yf = sub->add_option("--y-file", o.y_file);
        auto *xf = sub->add_option("--x-file", o.x_file);
        yf->excludes(xf);
    }
    bounds->add_option("--c", o.c, "exponent of the constant-time baselines");
    oracle->add_option("--budget", o.budget, "node budget of the enumeration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "error: usage: " << msg << '\n';
        return 2;
    }

    if (*build)
        return cmd_build(o);
    if (*predict)
        return cmd_predict(o);
    if (*stats)
        return cmd_stats(o);
    if (*verify)
        return cmd_verify(o);
    if (*bounds)
        return cmd_bounds(o);
    return cmd_oracle_count(o);
}

template <class E>
int fail(const char *kind, const E &e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: " << kind << ": " << msg << '\n';
    return 1;
}

} // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const ingestion_error &e) {
        return fail("ingestion", e);
    } catch (const io_error &e) {
        return fail("io", e);
    } catch (const format_error &e) {
        return fail("format", e);
    } catch (const range_error &e) {
        return fail("range", e);
    } catch (const degenerate_input_error &e) {
        return fail("degenerate_input", e);
    } catch (const validation_error &e) {
        return fail("validation", e);
    } catch (const plastore::domain_error &e) {
        return fail("domain", e);
    } catch (const coverage_error &e) {
        return fail("coverage", e);
    } catch (const resource_error &e) {
        return fail("resource", e);
    } catch (const std::exception &e) {
        return fail("internal", e);
    }
}
