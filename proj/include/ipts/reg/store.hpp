#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipts/sip/uri.hpp"

namespace ipts::reg {

enum class Privilege { Internal, External };

std::optional<Privilege> privilege_from(std::string_view text);
const char* to_string(Privilege p);

struct Subscriber {
    std::string extension;
    std::string display_name;
    std::string credential;  // MD5(user:realm:password) hex
    Privilege privilege = Privilege::Internal;
};

struct Binding {
    sip::SipUri aor;
    sip::SipUri contact;
    int64_t expires_at = 0;     // unix seconds
    int64_t registered_at = 0;  // unix seconds
};

// Subscribers from the users file, bindings fed by REGISTER and replicated
// through an append-only journal shared between proxies. All mutation happens
// on the owning event loop.
class LocationStore {
public:
    // Throws std::runtime_error naming the offending line.
    void load_users(const std::string& path);
    void load_users_text(const std::string& text, const std::string& origin = "users");

    const Subscriber* find_subscriber(const std::string& extension) const;
    size_t subscriber_count() const { return subscribers_.size(); }

    // Journal: replayed once at attach, then appended to; poll_journal picks up
    // lines other writers appended since our last read.
    void attach_journal(const std::string& path);
    void poll_journal();
    const std::string& journal_path() const { return journal_path_; }

    void add_binding(const Binding& binding);
    void remove_binding(const sip::SipUri& aor, const sip::SipUri& contact);
    std::vector<Binding> lookup(const sip::SipUri& aor, int64_t now_s) const;
    int expire_bindings(int64_t now_s);
    size_t binding_count() const;

private:
    void apply_add(const Binding& binding);
    bool apply_del(const std::string& aor_text, const std::string& contact_text);
    void journal_line(const std::string& line);
    void consume_journal(std::istream& in);

    std::map<std::string, Subscriber> subscribers_;
    std::map<std::string, std::vector<Binding>> bindings_;  // keyed by aor text
    std::string journal_path_;
    std::ofstream journal_out_;
    std::streamoff journal_offset_ = 0;
};

}  // namespace ipts::reg
