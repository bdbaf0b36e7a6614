#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "repomech/audit.hpp"
#include "repomech/commitments.hpp"
#include "repomech/errors.hpp"
#include "repomech/hashing.hpp"

#include "fixtures.hpp"

using namespace repomech;
using namespace repomech::audit;
namespace cmt = repomech::commitments;

namespace {

std::vector<wire::ScheduleEntry> ramp_entries(size_t n) {
    std::vector<wire::ScheduleEntry> out;
    for (size_t i = 0; i < n; ++i)
        out.push_back({static_cast<wire::Fp>(i) * 1000000000,
                       static_cast<wire::Fp>(i) * 100000000});
    return out;
}

AuditTranscript settled_transcript(bool auditor) {
    return build_transcript(fixtures::settled_state(), auditor);
}

ExpectedRoots roots_of(const AuditTranscript& t) { return {t.root_mm, t.root_rm}; }

}  // namespace

TEST_CASE("sha256 and tagged hashing match known vectors") {
    CHECK(hashing::hex(hashing::sha256("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hashing::hex(hashing::sha256("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hashing::tagged("TAG", {"a", "b"}) == hashing::sha256("TAGab"));
    CHECK(hashing::tagged("TA", {"Gab"}) == hashing::sha256("TAGab"));

    auto d = hashing::sha256("abc");
    CHECK(hashing::unhex(hashing::hex(d)) == d);
    CHECK_THROWS_AS((void)hashing::unhex("xyz"), Error);
    CHECK_THROWS_AS((void)hashing::unhex(std::string(63, 'a')), Error);
    // only the canonical lowercase spelling decodes, so a digest has exactly
    // one serialized form
    CHECK_THROWS_AS((void)hashing::unhex(std::string(64, 'A')), Error);
}

TEST_CASE("membership proofs verify and have logarithmic depth") {
    for (size_t n : {2u, 3u, 4u, 5u, 8u, 9u, 16u, 17u}) {
        auto entries = ramp_entries(n);
        auto salts = fixtures::salts_for(n, 100);
        auto com = cmt::commit_schedule(entries, salts);
        CHECK(com.leaf_count == n);
        CHECK(com.salt_commitments.size() == n);
        size_t want_depth = static_cast<size_t>(std::ceil(std::log2(double(n))));
        for (uint32_t i = 0; i < n; ++i) {
            auto proof = cmt::prove_membership(entries, salts, i);
            CHECK(proof.path.size() == want_depth);
            CHECK(cmt::verify_membership(com.root, proof));
        }
    }
}

TEST_CASE("membership proofs reject any tamper") {
    auto entries = ramp_entries(5);
    auto salts = fixtures::salts_for(5, 100);
    auto com = cmt::commit_schedule(entries, salts);
    auto proof = cmt::prove_membership(entries, salts, 2);

    auto bad = proof;
    bad.entry.rate += 1;
    CHECK_FALSE(cmt::verify_membership(com.root, bad));

    bad = proof;
    bad.index = 3;
    CHECK_FALSE(cmt::verify_membership(com.root, bad));

    bad = proof;
    bad.salt[0] ^= 1;
    CHECK_FALSE(cmt::verify_membership(com.root, bad));

    bad = proof;
    bad.path[1].sibling[4] ^= 1;
    CHECK_FALSE(cmt::verify_membership(com.root, bad));

    auto wrong_root = com.root;
    wrong_root[0] ^= 1;
    CHECK_FALSE(cmt::verify_membership(wrong_root, proof));

    // commitments are salt-dependent: same entries, fresh salts, new root
    auto com2 = cmt::commit_schedule(entries, fixtures::salts_for(5, 200));
    CHECK(com2.root != com.root);
}

TEST_CASE("sealed boxes roundtrip and authenticate") {
    auto box = cmt::seal_for("BD-mm", "the payload");
    CHECK(open_sealed(box) == "the payload");

    auto other = cmt::seal_for("BD-rm", "the payload");
    CHECK(other.ciphertext != box.ciphertext);  // keyed per recipient

    auto bad = box;
    bad.ciphertext[0] ^= 1;
    CHECK_THROWS_AS((void)cmt::open_sealed(bad), Error);
    bad = box;
    bad.mac[0] ^= 1;
    CHECK_THROWS_AS((void)cmt::open_sealed(bad), Error);
    bad = box;
    bad.recipient = "EVE";
    CHECK_THROWS_AS((void)cmt::open_sealed(bad), Error);
}

TEST_CASE("transcripts build only from terminal states") {
    auto live = fixtures::negotiating_state();
    CHECK_THROWS_AS((void)build_transcript(live, false), ProtocolError);

    auto pub = settled_transcript(false);
    CHECK(pub.final_phase == "settled");
    CHECK(pub.root_mm.has_value());
    CHECK(pub.root_rm.has_value());
    CHECK(pub.kappa_hat == 1000000000);
    REQUIRE(pub.outcome.has_value());
    CHECK(pub.proof_mm.has_value());
    CHECK(pub.proof_rm.has_value());
    CHECK(pub.sealed.size() == 2);
    CHECK_FALSE(pub.opening_mm.has_value());
    CHECK_FALSE(pub.opening_rm.has_value());
    CHECK(open_sealed(pub.sealed[0]) == outcome_payload(*pub.outcome));

    auto full = settled_transcript(true);
    REQUIRE(full.opening_mm.has_value());
    REQUIRE(full.opening_rm.has_value());
    CHECK(full.opening_mm->entries == fixtures::mm_entries3());

    auto ab = build_transcript(fixtures::aborted_state(), false);
    CHECK(ab.final_phase == "aborted");
    CHECK_FALSE(ab.outcome.has_value());
    CHECK(ab.sealed.empty());
}

TEST_CASE("honest transcripts pass at their tier") {
    auto pub = settled_transcript(false);
    auto v1 = verify_transcript(pub, roots_of(pub));
    CHECK(v1.tier == Verdict::Tier::public_ok);
    CHECK(v1.passed());
    CHECK(v1.failed_check.empty());

    auto full = settled_transcript(true);
    CHECK(verify_transcript(full, roots_of(full)).tier == Verdict::Tier::full_ok);

    // aborted runs audit too, including under openings
    auto ab_pub = build_transcript(fixtures::aborted_state(), false);
    CHECK(verify_transcript(ab_pub, roots_of(ab_pub)).tier == Verdict::Tier::public_ok);
    auto ab_full = build_transcript(fixtures::aborted_state(), true);
    CHECK(verify_transcript(ab_full, roots_of(ab_full)).tier == Verdict::Tier::full_ok);

    // verification works without out-of-band roots as well
    CHECK(verify_transcript(pub, {}).passed());
}

TEST_CASE("each tamper class trips its named check") {
    auto pub = settled_transcript(false);
    auto expected = roots_of(pub);

    auto expect_fail = [&](AuditTranscript t, const std::string& check) {
        auto v = verify_transcript(t, expected);
        CHECK_FALSE(v.passed());
        CHECK(v.failed_check == check);
    };

    {
        auto t = pub;
        t.log.erase(t.log.begin() + 3);
        expect_fail(t, "chain-mismatch");
    }
    {
        auto t = pub;
        t.log[2].time += 1;
        expect_fail(t, "chain-mismatch");
    }
    {
        auto t = pub;
        t.grid[1] += 1;
        expect_fail(t, "grid-log");
    }
    {
        auto t = pub;
        t.final_phase = "aborted";
        expect_fail(t, "phase-log");
    }
    {
        auto t = pub;
        t.kappa_hat = 1100000000;
        expect_fail(t, "kappa-log");
    }
    {
        auto t = pub;
        t.outcome->volume += 1;
        expect_fail(t, "outcome-log");
    }
    {
        auto t = pub;
        t.proof_mm->entry.rate += 1;
        expect_fail(t, "proof-entry");
    }
    {
        auto t = pub;
        t.proof_mm->path[0].sibling[7] ^= 1;
        expect_fail(t, "proof-mm");
    }
    {
        auto t = pub;
        t.proof_rm->salt[0] ^= 1;
        expect_fail(t, "proof-rm");
    }
    {
        auto t = pub;
        t.sealed[0].ciphertext[2] ^= 1;
        expect_fail(t, "sealed-mm");
    }
    {
        auto t = pub;
        std::swap(t.sealed[0], t.sealed[1]);
        expect_fail(t, "sealed-recipient");
    }
    {
        auto t = pub;
        (*t.root_mm)[0] ^= 1;  // disagrees with the countersigned intake root
        expect_fail(t, "root-mm-mismatch");
    }
    {
        // without out-of-band roots the in-chain record still pins it
        auto t = pub;
        (*t.root_rm)[0] ^= 1;
        auto v = verify_transcript(t, {});
        CHECK_FALSE(v.passed());
        CHECK(v.failed_check == "root-rm-log");
    }
    {
        auto t = build_transcript(fixtures::aborted_state(), false);
        t.outcome = SelectedTrade{1, 866025404, 750000000, 5250000000, 3000000000};
        auto v = verify_transcript(t, {t.root_mm, t.root_rm});
        CHECK_FALSE(v.passed());
        CHECK(v.failed_check == "aborted-extras");
    }
    {
        auto t = settled_transcript(true);
        t.opening_mm->entries[2].rate += 1;
        auto v = verify_transcript(t, {t.root_mm, t.root_rm});
        CHECK_FALSE(v.passed());
        CHECK(v.failed_check == "opening-root-mm");
    }
    {
        auto t = settled_transcript(true);
        t.opening_rm.reset();  // asymmetric opening set
        auto v = verify_transcript(t, {t.root_mm, t.root_rm});
        CHECK_FALSE(v.passed());
        CHECK(v.failed_check == "opening-rm");
    }
}

TEST_CASE("spread floor violations cannot pass even with a consistent log") {
    // hand-build a run whose selected spread undercuts twice kappa_hat by
    // tampering outcome and kappa together: the log pins at least one of them
    auto pub = settled_transcript(false);
    auto t = pub;
    t.kappa_hat = 2300000000;  // selected half-spread is 2.25
    auto v = verify_transcript(t, roots_of(t));
    CHECK_FALSE(v.passed());
    CHECK(v.failed_check == "kappa-log");
}

TEST_CASE("transcript serialization roundtrips byte-exactly") {
    for (bool auditor : {false, true}) {
        auto t = settled_transcript(auditor);
        auto text = serialize_transcript(t);
        auto back = parse_transcript(text);
        CHECK(serialize_transcript(back) == text);
        auto v = verify_transcript(back, roots_of(t));
        CHECK(v.tier == (auditor ? Verdict::Tier::full_ok : Verdict::Tier::public_ok));
    }
    auto ab = build_transcript(fixtures::aborted_state(), false);
    auto text = serialize_transcript(ab);
    CHECK(serialize_transcript(parse_transcript(text)) == text);

    CHECK_THROWS_AS((void)parse_transcript("not json"), Error);
    CHECK_THROWS_AS((void)parse_transcript("{}"), Error);
    CHECK_THROWS_AS((void)parse_transcript(R"({"version": 99})"), Error);
}

TEST_CASE("public transcripts never leak unselected rates") {
    using namespace repomech::contract;
    GenesisConfig cfg;
    cfg.grid = {0, 1000000000, 2000000000};
    cfg.deadlines = {10, 20, 30, 40};
    auto st = genesis(cfg);

    std::vector<wire::ScheduleEntry> mm{
        {0, 0}, {1000000000, 111111111}, {2000000000, 333333333}};
    std::vector<wire::ScheduleEntry> rm{
        {0, 888888888}, {1000000000, 777777777}, {2000000000, 422222222}};
    fixtures::must_apply(st, SubmitSchedule{"BD-mm", mm, fixtures::salts_for(3, 50), "sig:MM",
                                            "sig:BD-mm"});
    fixtures::must_apply(st, SubmitSchedule{"BD-rm", rm, fixtures::salts_for(3, 60), "sig:RM",
                                            "sig:BD-rm"});
    fixtures::must_apply(st, PostDeposit{"MM", Asset::cash, 2000000000});
    fixtures::must_apply(st, PostDeposit{"RM", Asset::securities, 2000000000});
    fixtures::must_apply(st, SubmitFirstSpread{"BD-mm", 300000000});
    fixtures::must_apply(st, RespondSpread{"BD-rm", true, 0});
    fixtures::must_apply(st, RequestExecute{"MM"});
    fixtures::must_apply(st, RequestExecute{"RM"});
    REQUIRE(st.phase == Phase::settled);
    REQUIRE(st.outcome->index == 1);

    auto text = serialize_transcript(build_transcript(st, false));
    // disclosed: the selected row
    CHECK(text.find("111111111") != std::string::npos);
    CHECK(text.find("777777777") != std::string::npos);
    // hidden: every other quoted rate
    CHECK(text.find("333333333") == std::string::npos);
    CHECK(text.find("422222222") == std::string::npos);
    CHECK(text.find("888888888") == std::string::npos);

    // the auditor form opens everything by design
    auto full = serialize_transcript(build_transcript(st, true));
    CHECK(full.find("333333333") != std::string::npos);
}

TEST_CASE("outcome payload is a fixed-width packed record") {
    SelectedTrade t{1, 866025404, 750000000, 5250000000, 3000000000};
    auto p = outcome_payload(t);
    CHECK(p.size() == std::string("OUTCOME").size() + 5 * 8);
    CHECK(p.rfind("OUTCOME", 0) == 0);
    CHECK(outcome_payload(t) == p);
    t.volume += 1;
    CHECK(outcome_payload(t) != p);
}
