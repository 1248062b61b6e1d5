#include "ipts/proxy/cdr.hpp"

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "ipts/util/strings.hpp"

namespace ipts::proxy {

const char* const kCdrHeader = "call_id,caller,callee,start_ms,answer_ms,end_ms,duration_ms,disposition";

const char* to_string(Disposition d) {
    switch (d) {
        case Disposition::Answered: return "Answered";
        case Disposition::NoAnswer: return "NoAnswer";
        case Disposition::Busy: return "Busy";
        case Disposition::Failed: return "Failed";
        case Disposition::Cancelled: return "Cancelled";
    }
    return "?";
}

std::optional<Disposition> disposition_from(std::string_view text) {
    for (auto d : {Disposition::Answered, Disposition::NoAnswer, Disposition::Busy,
                   Disposition::Failed, Disposition::Cancelled})
        if (text == to_string(d)) return d;
    return std::nullopt;
}

int64_t Cdr::duration_ms() const {
    if (disposition != Disposition::Answered || !answer_ms) return 0;
    return end_ms - *answer_ms;
}

std::string Cdr::csv_line() const {
    // Fields are commaless by construction: Call-IDs and AORs we generate
    // never contain ',', so no quoting is needed.
    std::ostringstream out;
    out << call_id << ',' << caller << ',' << callee << ',' << start_ms << ',';
    if (answer_ms) out << *answer_ms;
    out << ',' << end_ms << ',' << duration_ms() << ',' << to_string(disposition);
    return out.str();
}

CdrWriter::CdrWriter(std::string path) : path_(std::move(path)) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path_, ec) ||
                       std::filesystem::file_size(path_, ec) == 0;
    out_.open(path_, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open cdr file: " + path_);
    if (fresh) out_ << kCdrHeader << "\n" << std::flush;
}

void CdrWriter::append(const Cdr& cdr) {
    out_ << cdr.csv_line() << "\n" << std::flush;
}

std::vector<Cdr> read_cdrs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cdr file: " + path);
    std::vector<Cdr> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            if (line == kCdrHeader) continue;
        }
        if (line.empty()) continue;
        auto fields = util::split(line, ',');
        if (fields.size() != 8) throw std::runtime_error("bad cdr line: " + line);
        Cdr c;
        c.call_id = fields[0];
        c.caller = fields[1];
        c.callee = fields[2];
        auto start = util::parse_int<int64_t>(fields[3]);
        auto end = util::parse_int<int64_t>(fields[5]);
        auto disp = disposition_from(fields[7]);
        if (!start || !end || !disp) throw std::runtime_error("bad cdr line: " + line);
        c.start_ms = *start;
        c.end_ms = *end;
        c.disposition = *disp;
        if (!fields[4].empty()) {
            auto ans = util::parse_int<int64_t>(fields[4]);
            if (!ans) throw std::runtime_error("bad cdr line: " + line);
            c.answer_ms = *ans;
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace ipts::proxy
