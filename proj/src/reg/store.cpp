#include "ipts/reg/store.hpp"

#include <sstream>
#include <stdexcept>

#include "ipts/util/log.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::reg {

std::optional<Privilege> privilege_from(std::string_view text) {
    if (util::iequals(text, "internal")) return Privilege::Internal;
    if (util::iequals(text, "external")) return Privilege::External;
    return std::nullopt;
}

const char* to_string(Privilege p) {
    return p == Privilege::External ? "External" : "Internal";
}

void LocationStore::load_users(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("users file unreadable: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    load_users_text(buf.str(), path);
}

void LocationStore::load_users_text(const std::string& text, const std::string& origin) {
    std::map<std::string, Subscriber> fresh;
    int line_no = 0;
    for (const auto& raw_line : util::split(text, '\n')) {
        ++line_no;
        std::string line(util::trim(raw_line));
        if (line.empty() || line[0] == '#') continue;
        auto fields = util::split(line, ',');
        if (fields.size() != 4)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected 4 fields");
        Subscriber s;
        s.extension = util::trim(fields[0]);
        s.display_name = util::trim(fields[1]);
        s.credential = util::trim(fields[2]);
        auto priv = privilege_from(util::trim(fields[3]));
        if (s.extension.empty() || !util::all_digits(s.extension) || !priv)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": bad record");
        if (s.credential.size() != 32)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": bad digest");
        s.privilege = *priv;
        if (!fresh.emplace(s.extension, s).second)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": duplicate extension " + s.extension);
    }
    subscribers_ = std::move(fresh);
}

const Subscriber* LocationStore::find_subscriber(const std::string& extension) const {
    auto it = subscribers_.find(extension);
    return it == subscribers_.end() ? nullptr : &it->second;
}

void LocationStore::attach_journal(const std::string& path) {
    journal_path_ = path;
    journal_offset_ = 0;
    {
        std::ifstream in(path);
        if (in) consume_journal(in);
    }
    journal_out_.open(path, std::ios::app);
}

void LocationStore::poll_journal() {
    if (journal_path_.empty()) return;
    std::ifstream in(journal_path_);
    if (!in) return;
    in.seekg(journal_offset_);
    consume_journal(in);
}

void LocationStore::consume_journal(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        // another writer may be mid-append; leave partial trailing lines alone
        if (in.eof()) break;
        journal_offset_ += static_cast<std::streamoff>(line.size()) + 1;
        std::string trimmed(util::trim(line));
        if (trimmed.empty()) continue;
        auto parts = util::split_ws(trimmed);
        if (parts.size() != 4) {
            log::warn("journal: skipping malformed record at offset ",
                      journal_offset_ - static_cast<std::streamoff>(line.size()) - 1);
            continue;
        }
        if (parts[0] == "ADD") {
            auto aor = sip::SipUri::parse(parts[1]);
            auto contact = sip::SipUri::parse(parts[2]);
            auto expires = util::parse_int<int64_t>(parts[3]);
            if (!aor || !contact || !expires) continue;
            Binding b;
            b.aor = *aor;
            b.contact = *contact;
            b.expires_at = *expires;
            b.registered_at = 0;
            apply_add(b);
        } else if (parts[0] == "DEL") {
            apply_del(parts[1], parts[2]);
        } else {
            log::warn("journal: unknown verb ", parts[0]);
        }
    }
}

void LocationStore::journal_line(const std::string& line) {
    if (!journal_out_.is_open()) return;
    journal_out_ << line << "\n";
    journal_out_.flush();
}

void LocationStore::apply_add(const Binding& binding) {
    auto& list = bindings_[binding.aor.to_string()];
    for (auto& existing : list) {
        if (existing.contact == binding.contact) {
            existing.expires_at = binding.expires_at;
            existing.registered_at = binding.registered_at;
            return;
        }
    }
    list.push_back(binding);
}

bool LocationStore::apply_del(const std::string& aor_text, const std::string& contact_text) {
    auto it = bindings_.find(aor_text);
    if (it == bindings_.end()) return false;
    auto& list = it->second;
    size_t before = list.size();
    std::erase_if(list, [&](const Binding& b) { return b.contact.to_string() == contact_text; });
    if (list.empty()) bindings_.erase(it);
    return list.size() != before;
}

void LocationStore::add_binding(const Binding& binding) {
    apply_add(binding);
    journal_line("ADD " + binding.aor.to_string() + " " + binding.contact.to_string() + " " +
                 std::to_string(binding.expires_at));
}

void LocationStore::remove_binding(const sip::SipUri& aor, const sip::SipUri& contact) {
    apply_del(aor.to_string(), contact.to_string());
    journal_line("DEL " + aor.to_string() + " " + contact.to_string() + " 0");
}

std::vector<Binding> LocationStore::lookup(const sip::SipUri& aor, int64_t now_s) const {
    auto it = bindings_.find(aor.to_string());
    if (it == bindings_.end()) return {};
    std::vector<Binding> out;
    for (const auto& b : it->second)
        if (b.expires_at > now_s) out.push_back(b);
    return out;
}

int LocationStore::expire_bindings(int64_t now_s) {
    int removed = 0;
    for (auto it = bindings_.begin(); it != bindings_.end();) {
        auto& list = it->second;
        size_t before = list.size();
        std::erase_if(list, [&](const Binding& b) { return b.expires_at <= now_s; });
        removed += static_cast<int>(before - list.size());
        it = list.empty() ? bindings_.erase(it) : std::next(it);
    }
    return removed;
}

size_t LocationStore::binding_count() const {
    size_t n = 0;
    for (const auto& [aor, list] : bindings_) n += list.size();
    return n;
}

}  // namespace ipts::reg
