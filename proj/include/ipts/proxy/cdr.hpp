#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace ipts::proxy {

enum class Disposition { Answered, NoAnswer, Busy, Failed, Cancelled };

const char* to_string(Disposition d);
std::optional<Disposition> disposition_from(std::string_view text);

struct Cdr {
    std::string call_id;
    std::string caller;  // caller address-of-record
    std::string callee;  // dialed URI
    int64_t start_ms = 0;
    std::optional<int64_t> answer_ms;
    int64_t end_ms = 0;
    Disposition disposition = Disposition::Failed;

    // Talk time only; ringing and setup never count.
    int64_t duration_ms() const;
    std::string csv_line() const;
};

// Append-only CSV writer; one line per completed call, flushed per record so
// a concurrent reader never sees a torn line.
class CdrWriter {
public:
    explicit CdrWriter(std::string path);
    void append(const Cdr& cdr);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

extern const char* const kCdrHeader;

// Skips the header line; malformed lines throw std::runtime_error.
std::vector<Cdr> read_cdrs(const std::string& path);

}  // namespace ipts::proxy
