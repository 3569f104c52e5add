#include "mbpcn/csv.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mbpcn {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double_token(const std::string& token) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error("malformed numeric token '" + token + "'");
    return v;
}

namespace {

constexpr const char* kTimeseriesHeader = "step,t,tau,sup_norm,energy,pred_iters,corr_iters,mbp_margin";

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

long parse_long_token(const std::string& token) {
    long v = 0;
    const char* first = token.data();
    const char* last = first + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error("malformed integer token '" + token + "'");
    return v;
}

} // namespace

void write_timeseries(const RunRecord& record, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << kTimeseriesHeader << '\n';
    for (const StepRow& r : record.rows) {
        out << r.step << ',' << format_double(r.t) << ',' << format_double(r.tau) << ','
            << format_double(r.sup_norm) << ',' << format_double(r.energy) << ',' << r.pred_iters
            << ',' << r.corr_iters << ',' << format_double(r.mbp_margin) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<StepRow> read_timeseries(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::string line;
    if (!std::getline(in, line) || line != kTimeseriesHeader)
        throw std::runtime_error("'" + path + "' is not a time-series file (bad header)");
    std::vector<StepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 8) throw std::runtime_error("'" + path + "': expected 8 columns");
        StepRow r;
        r.step = parse_long_token(f[0]);
        r.t = parse_double_token(f[1]);
        r.tau = parse_double_token(f[2]);
        r.sup_norm = parse_double_token(f[3]);
        r.energy = parse_double_token(f[4]);
        r.pred_iters = static_cast<int>(parse_long_token(f[5]));
        r.corr_iters = static_cast<int>(parse_long_token(f[6]));
        r.mbp_margin = parse_double_token(f[7]);
        rows.push_back(r);
    }
    return rows;
}

void write_snapshot(const CellField& state, double t, const std::string& path) {
    std::ofstream out = open_for_write(path);
    const int m = state.m();
    out << "# t=" << format_double(t) << '\n';
    out << "# M=" << m << '\n';
    out << "# h=" << format_double(state.h()) << '\n';
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (j) out << ',';
            out << format_double(state(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SnapshotData read_snapshot(const std::string& path) {
    std::ifstream in = open_for_read(path);
    SnapshotData snap;
    std::string line;
    for (int k = 0; k < 3; ++k) {
        if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
            throw std::runtime_error("'" + path + "' is not a snapshot file (bad comment header)");
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("'" + path + "': malformed header line");
        const std::string key = line.substr(2, eq - 2);
        const std::string value = line.substr(eq + 1);
        if (key == "t")
            snap.t = parse_double_token(value);
        else if (key == "M")
            snap.m = static_cast<int>(parse_long_token(value));
        else if (key == "h")
            snap.h = parse_double_token(value);
        else
            throw std::runtime_error("'" + path + "': unexpected header key '" + key + "'");
    }
    snap.values.reserve(static_cast<std::size_t>(snap.m) * snap.m);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (const auto& tok : split_csv(line)) snap.values.push_back(parse_double_token(tok));
    }
    if (snap.values.size() != static_cast<std::size_t>(snap.m) * snap.m)
        throw std::runtime_error("'" + path + "': value count does not match M*M");
    return snap;
}

void write_snapshot_binary(const CellField& state, const std::string& path) {
    static_assert(sizeof(double) == 8);
    std::ofstream out = open_for_write(path);
    const auto vals = state.data();
    for (double v : vals) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
        out.write(bytes, 8);
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_convergence_table(const std::vector<ConvergenceRow>& rows, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << "n_steps,max_ratio,err_h1,order_h1,err_sup,order_sup\n";
    for (const auto& r : rows) {
        out << r.n_steps << ',' << format_double(r.max_ratio) << ',' << format_double(r.err_h1)
            << ',' << format_double(r.order_h1) << ',' << format_double(r.err_sup) << ','
            << format_double(r.order_sup) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_bubble_series(const BubbleReport& report, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << "t,measured_radius,predicted_radius\n";
    for (const auto& s : report.series) {
        out << format_double(s.t) << ',' << format_double(s.measured_radius) << ','
            << format_double(s.predicted_radius) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace mbpcn
