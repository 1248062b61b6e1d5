#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "ipts/net/clock.hpp"
#include "ipts/reg/registrar.hpp"
#include "ipts/reg/store.hpp"
#include "ipts/sip/build.hpp"
#include "ipts/sip/digest.hpp"
#include "ipts/util/md5.hpp"

using namespace ipts;
using namespace ipts::reg;
using sip::SipRequest;
using sip::SipResponse;
using sip::StatusCode;

namespace {

const char* kUsersText =
    "# extension,display,credential,privilege\n"
    "2001,Alice Harper,{A},Internal\n"
    "2002,Bob Keane,{B},External\n"
    "\n"
    "2003,Carol Diaz,{C},internal\n";

std::string users_with_digests() {
    std::string text = kUsersText;
    auto sub = [&](const std::string& tag, const std::string& digest) {
        text.replace(text.find(tag), tag.size(), digest);
    };
    sub("{A}", sip::digest_ha1("2001", "pbx", "pw2001"));
    sub("{B}", sip::digest_ha1("2002", "pbx", "pw2002"));
    sub("{C}", sip::digest_ha1("2003", "pbx", "pw2003"));
    return text;
}

SipRequest make_register(const std::string& ext, const std::string& contact_port,
                         int cseq = 1, std::optional<int64_t> expires = {}) {
    sip::Via via;
    via.host = "127.0.0.1";
    via.port = 5062;
    via.params = {{"branch", "z9hG4bK-reg-" + ext + "-" + std::to_string(cseq)}};
    auto builder =
        sip::RequestBuilder(sip::SipMethod::Register, *sip::SipUri::parse("sip:pbx"))
            .via(via)
            .from("<sip:" + ext + "@pbx>;tag=t" + ext)
            .to("<sip:" + ext + "@pbx>")
            .call_id("reg-" + ext + "@127.0.0.1")
            .cseq(cseq)
            .contact("<sip:" + ext + "@127.0.0.1:" + contact_port + ">");
    if (expires) builder.header("Expires", std::to_string(*expires));
    return builder.build();
}

// Independent restatement of the credential chain the server must accept.
std::string answer_challenge(SipRequest& req, const SipResponse& challenge,
                             const std::string& user, const std::string& password) {
    auto ch = sip::DigestChallenge::parse(*challenge.header("WWW-Authenticate"));
    REQUIRE(ch.has_value());
    std::string ha1 = util::md5_hex(user + ":" + ch->realm + ":" + password);
    std::string ha2 = util::md5_hex(req.method.token() + ":" + req.request_uri.to_string());
    std::string response = util::md5_hex(ha1 + ":" + ch->nonce + ":" + ha2);
    sip::DigestCredentials creds;
    creds.username = user;
    creds.realm = ch->realm;
    creds.nonce = ch->nonce;
    creds.uri = req.request_uri.to_string();
    creds.response = response;
    req.set_header("Authorization", creds.to_header_value());
    return ch->nonce;
}

struct Fixture {
    net::VirtualClock clock{1'000'000'000'000};  // fixed epoch, ms
    LocationStore store;
    Registrar registrar{store, "pbx", clock};

    Fixture() { store.load_users_text(users_with_digests()); }

    SipResponse register_ok(const std::string& ext, const std::string& port,
                            const std::string& password, int cseq = 1,
                            std::optional<int64_t> expires = {}) {
        auto req = make_register(ext, port, cseq, expires);
        auto ch = registrar.handle_register(req);
        if (ch.status.code != 401) return ch;
        answer_challenge(req, ch, ext, password);
        return registrar.handle_register(req);
    }
};

}  // namespace

TEST_CASE("users file parsing") {
    LocationStore store;
    store.load_users_text(users_with_digests());
    CHECK(store.subscriber_count() == 3);
    const Subscriber* alice = store.find_subscriber("2001");
    REQUIRE(alice);
    CHECK(alice->display_name == "Alice Harper");
    CHECK(alice->privilege == Privilege::Internal);
    CHECK(store.find_subscriber("2002")->privilege == Privilege::External);
    CHECK(store.find_subscriber("2003")->privilege == Privilege::Internal);
    CHECK(store.find_subscriber("9999") == nullptr);

    LocationStore empty;
    empty.load_users_text("# nobody here\n\n");
    CHECK(empty.subscriber_count() == 0);

    CHECK_THROWS_WITH_AS(empty.load_users_text("2001,Alice\n", "u"), "u:1: expected 4 fields",
                         std::runtime_error);
    CHECK_THROWS_AS(empty.load_users_text("20x1,A,00112233445566778899aabbccddeeff,Internal\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(empty.load_users_text("2001,A,deadbeef,Internal\n"), std::runtime_error);
    CHECK_THROWS_AS(empty.load_users_text("2001,A,00112233445566778899aabbccddeeff,Boss\n"),
                    std::runtime_error);
    std::string dup =
        "2001,A,00112233445566778899aabbccddeeff,Internal\n"
        "2001,B,00112233445566778899aabbccddeeff,Internal\n";
    CHECK_THROWS_AS(empty.load_users_text(dup), std::runtime_error);
}

TEST_CASE("first REGISTER without credentials draws a challenge") {
    Fixture fx;
    auto req = make_register("2001", "5062");
    auto resp = fx.registrar.handle_register(req);
    CHECK(resp.status.code == 401);
    auto header = resp.header("WWW-Authenticate");
    REQUIRE(header.has_value());
    auto ch = sip::DigestChallenge::parse(*header);
    REQUIRE(ch.has_value());
    CHECK(ch->realm == "pbx");
    CHECK_FALSE(ch->nonce.empty());
    CHECK_FALSE(ch->stale);
    // nothing was stored
    CHECK(fx.store.binding_count() == 0);
}

TEST_CASE("digest handshake stores a binding and lookup finds it") {
    Fixture fx;
    auto ok = fx.register_ok("2001", "5062", "pw2001");
    REQUIRE(ok.status.code == 200);
    auto contact = ok.header("Contact");
    REQUIRE(contact.has_value());
    CHECK(contact->find("sip:2001@127.0.0.1:5062") != std::string::npos);
    CHECK(contact->find("expires=3600") != std::string::npos);

    auto bindings = fx.store.lookup(fx.registrar.aor_of("2001"), fx.clock.now_ms() / 1000);
    REQUIRE(bindings.size() == 1);
    CHECK(bindings[0].contact.to_string() == "sip:2001@127.0.0.1:5062");
    CHECK(bindings[0].expires_at - bindings[0].registered_at == 3600);
}

TEST_CASE("wrong password is refused with a fresh challenge, not stale") {
    Fixture fx;
    auto req = make_register("2001", "5062");
    auto ch = fx.registrar.handle_register(req);
    REQUIRE(ch.status.code == 401);
    answer_challenge(req, ch, "2001", "wrong-password");
    auto resp = fx.registrar.handle_register(req);
    CHECK(resp.status.code == 401);
    auto again = sip::DigestChallenge::parse(*resp.header("WWW-Authenticate"));
    REQUIRE(again.has_value());
    CHECK_FALSE(again->stale);
    CHECK(fx.store.binding_count() == 0);
}

TEST_CASE("nonce reuse is flagged stale") {
    Fixture fx;
    auto req = make_register("2001", "5062");
    auto ch = fx.registrar.handle_register(req);
    answer_challenge(req, ch, "2001", "pw2001");
    CHECK(fx.registrar.handle_register(req).status.code == 200);

    // identical retry: same nonce, correct password
    auto replay = fx.registrar.handle_register(req);
    CHECK(replay.status.code == 401);
    auto ch2 = sip::DigestChallenge::parse(*replay.header("WWW-Authenticate"));
    REQUIRE(ch2.has_value());
    CHECK(ch2->stale);
}

TEST_CASE("nonces expire after their validity window") {
    Fixture fx;
    auto req = make_register("2001", "5062");
    auto ch = fx.registrar.handle_register(req);
    answer_challenge(req, ch, "2001", "pw2001");
    fx.clock.advance(61 * 1000);
    auto resp = fx.registrar.handle_register(req);
    CHECK(resp.status.code == 401);
    auto ch2 = sip::DigestChallenge::parse(*resp.header("WWW-Authenticate"));
    CHECK(ch2->stale);
}

TEST_CASE("unknown user gets 404") {
    Fixture fx;
    auto req = make_register("4444", "5062");
    CHECK(fx.registrar.handle_register(req).status.code == 404);

    LocationStore none;
    none.load_users_text("");
    Registrar bare(none, "pbx", fx.clock);
    auto any = make_register("2001", "5062");
    CHECK(bare.handle_register(any).status.code == 404);
}

TEST_CASE("Expires 0 removes the binding") {
    Fixture fx;
    REQUIRE(fx.register_ok("2001", "5062", "pw2001").status.code == 200);
    CHECK(fx.store.binding_count() == 1);
    auto bye = fx.register_ok("2001", "5062", "pw2001", 2, 0);
    CHECK(bye.status.code == 200);
    CHECK(fx.store.lookup(fx.registrar.aor_of("2001"), fx.clock.now_ms() / 1000).empty());
    CHECK(fx.store.binding_count() == 0);
}

TEST_CASE("too-brief registration is bounced with 423 and the floor") {
    Fixture fx;
    auto resp = fx.register_ok("2001", "5062", "pw2001", 1, 30);
    CHECK(resp.status.code == 423);
    CHECK(resp.header("Min-Expires") == "60");
    CHECK(fx.store.binding_count() == 0);
    // exactly the floor is accepted
    CHECK(fx.register_ok("2001", "5062", "pw2001", 2, 60).status.code == 200);
}

TEST_CASE("two devices on one extension both appear for forking") {
    Fixture fx;
    REQUIRE(fx.register_ok("2001", "5062", "pw2001").status.code == 200);
    REQUIRE(fx.register_ok("2001", "5072", "pw2001", 2).status.code == 200);
    auto bindings = fx.store.lookup(fx.registrar.aor_of("2001"), fx.clock.now_ms() / 1000);
    REQUIRE(bindings.size() == 2);
    CHECK(bindings[0].contact != bindings[1].contact);

    // re-registering the first device refreshes rather than duplicates
    REQUIRE(fx.register_ok("2001", "5062", "pw2001", 3).status.code == 200);
    CHECK(fx.store.lookup(fx.registrar.aor_of("2001"), fx.clock.now_ms() / 1000).size() == 2);
}

TEST_CASE("expired bindings never surface and the sweeper counts them") {
    Fixture fx;
    REQUIRE(fx.register_ok("2001", "5062", "pw2001").status.code == 200);
    REQUIRE(fx.register_ok("2002", "5064", "pw2002").status.code == 200);
    CHECK(fx.store.expire_bindings(fx.clock.now_ms() / 1000) == 0);

    int64_t later = fx.clock.now_ms() / 1000 + 3601;
    CHECK(fx.store.lookup(fx.registrar.aor_of("2001"), later).empty());
    CHECK(fx.store.expire_bindings(later) == 2);
    CHECK(fx.store.binding_count() == 0);

    // sweep across the horizon: at no instant does an expired binding surface
    Fixture fx2;
    REQUIRE(fx2.register_ok("2001", "5062", "pw2001").status.code == 200);
    int64_t t0 = fx2.clock.now_ms() / 1000;
    for (int64_t t = t0; t <= t0 + 4000; t += 97) {
        auto found = fx2.store.lookup(fx2.registrar.aor_of("2001"), t);
        bool expect_live = t < t0 + 3600;
        CHECK(found.size() == (expect_live ? 1u : 0u));
    }
}

TEST_CASE("journal replay reconstructs the binding set and is idempotent") {
    auto path = (std::filesystem::temp_directory_path() / "ipts_journal_test.log").string();
    std::remove(path.c_str());

    int64_t now = 1'000'000'000;
    {
        Fixture fx;
        fx.store.attach_journal(path);
        REQUIRE(fx.register_ok("2001", "5062", "pw2001").status.code == 200);
        REQUIRE(fx.register_ok("2002", "5064", "pw2002").status.code == 200);
        REQUIRE(fx.register_ok("2002", "5074", "pw2002", 2).status.code == 200);
        REQUIRE(fx.register_ok("2001", "5062", "pw2001", 2, 0).status.code == 200);  // unregister
    }

    LocationStore replayed;
    replayed.load_users_text(users_with_digests());
    replayed.attach_journal(path);
    CHECK(replayed.binding_count() == 2);
    CHECK(replayed.lookup(*sip::SipUri::parse("sip:2001@pbx"), now).empty());
    auto b2002 = replayed.lookup(*sip::SipUri::parse("sip:2002@pbx"), now);
    CHECK(b2002.size() == 2);

    // replaying on top of already-applied state changes nothing
    LocationStore twice;
    twice.load_users_text(users_with_digests());
    twice.attach_journal(path);
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(twice.binding_count() == 2);
    std::remove(path.c_str());
    CHECK(all.find("ADD sip:2001@pbx sip:2001@127.0.0.1:5062") != std::string::npos);
    CHECK(all.find("DEL sip:2001@pbx sip:2001@127.0.0.1:5062") != std::string::npos);
}

TEST_CASE("a standby store following the journal serves identical lookups") {
    auto path = (std::filesystem::temp_directory_path() / "ipts_journal_follow.log").string();
    std::remove(path.c_str());

    Fixture active;
    active.store.attach_journal(path);

    LocationStore standby;
    standby.load_users_text(users_with_digests());
    standby.attach_journal(path);

    REQUIRE(active.register_ok("2001", "5062", "pw2001").status.code == 200);
    CHECK(standby.binding_count() == 0);  // not yet polled
    standby.poll_journal();
    CHECK(standby.binding_count() == 1);
    int64_t now = active.clock.now_ms() / 1000;
    auto got = standby.lookup(*sip::SipUri::parse("sip:2001@pbx"), now);
    REQUIRE(got.size() == 1);
    CHECK(got[0].contact.to_string() == "sip:2001@127.0.0.1:5062");

    // polls are cheap no-ops when nothing changed
    standby.poll_journal();
    CHECK(standby.binding_count() == 1);

    // removal also crosses over
    REQUIRE(active.register_ok("2001", "5062", "pw2001", 2, 0).status.code == 200);
    standby.poll_journal();
    CHECK(standby.binding_count() == 0);
    std::remove(path.c_str());
}

TEST_CASE("query REGISTER with no contact lists current bindings") {
    Fixture fx;
    REQUIRE(fx.register_ok("2001", "5062", "pw2001").status.code == 200);
    auto query = make_register("2001", "5062", 5);
    query.remove_header("Contact");
    auto ch = fx.registrar.handle_register(query);
    REQUIRE(ch.status.code == 401);
    answer_challenge(query, ch, "2001", "pw2001");
    auto resp = fx.registrar.handle_register(query);
    REQUIRE(resp.status.code == 200);
    auto contacts = resp.header_values("Contact");
    REQUIRE(contacts.size() == 1);
    CHECK(contacts[0].find("5062") != std::string::npos);
    CHECK(fx.store.binding_count() == 1);
}

TEST_CASE("authentication verdict is deterministic") {
    Fixture fx;
    auto req = make_register("2001", "5062");
    auto ch = fx.registrar.handle_register(req);
    answer_challenge(req, ch, "2001", "pw2001");
    // the same request evaluated twice cannot flip from rejected to accepted
    auto r1 = fx.registrar.handle_register(req);
    auto r2 = fx.registrar.handle_register(req);
    CHECK(r1.status.code == 200);
    CHECK(r2.status.code == 401);  // nonce burn is the only state change
    auto r3 = fx.registrar.handle_register(req);
    CHECK(r3.status.code == r2.status.code);
}
