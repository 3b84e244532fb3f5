#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "fk/braid.hpp"

using namespace fk;

static const char* FIG8 = "1 -2 1 -2";

static std::vector<std::string> codes_from_signs(const Diagram& d,
                                                 const SignAssignment& s) {
    std::vector<std::string> codes;
    for (const auto& c : d.crossings) {
        std::string code;
        for (int seg : {c.i, c.j, c.ip, c.jp}) code += (s[seg] > 0 ? 'p' : 'm');
        codes.push_back(code);
    }
    return codes;
}

TEST_CASE("braid word parsing") {
    BraidWord w = parse_braid(FIG8);
    CHECK(w.strands == 3);
    CHECK(w.letters.size() == 4);
    CHECK(w.letters[0] == std::pair{1, 1});
    CHECK(w.letters[1] == std::pair{2, -1});
    CHECK(w.str() == "1 -2 1 -2");

    BraidWord t = parse_braid("s1 s2^-1 s1 s2^-1");
    CHECK(t.str() == w.str());

    BraidWord padded = parse_braid("1 1 1", 4);
    CHECK(padded.strands == 4);

    CHECK_THROWS(parse_braid("0 1"));
    CHECK_THROWS(parse_braid("3", 2));  // position out of range
}

TEST_CASE("figure-eight closure diagram") {
    Diagram d = build_diagram(parse_braid(FIG8));
    CHECK(d.strands == 3);
    // 3 bottom boundary segments + 2 new per crossing
    CHECK(d.nseg == 11);
    CHECK(d.crossings.size() == 4);
    std::set<int> cols;
    for (const auto& c : d.crossings) cols.insert(c.pos);
    CHECK(cols.size() == 2);
    CHECK(d.ncomp == 1);
    // closing all strands but the leftmost of a 3-braid pairs 2 segments
    CHECK(d.closure_pairs.size() == 2);
    CHECK(d.open_bot == 0);

    Diagram wh = build_diagram(parse_braid("1 -2 1 -2 1"));
    CHECK(wh.ncomp == 2);
    CHECK(wh.segcomp[wh.open_bot] == wh.open_comp);
}

TEST_CASE("homogeneous sign assignments") {
    Diagram fig8 = build_diagram(parse_braid(FIG8));
    auto hom = homogeneous_signs(fig8);
    REQUIRE(hom.has_value());
    CHECK(condition_a(fig8, *hom));

    Diagram trefoil = build_diagram(parse_braid("1 1 1"));
    auto homt = homogeneous_signs(trefoil);
    REQUIRE(homt.has_value());
    for (int v : *homt) CHECK(v == 1);

    Diagram mixed = build_diagram(parse_braid("1 1 -1"));
    CHECK(!homogeneous_signs(mixed).has_value());
}

TEST_CASE("convergence certification") {
    Diagram fig8 = build_diagram(parse_braid(FIG8));
    auto hom = homogeneous_signs(fig8);
    REQUIRE(hom.has_value());
    auto cert = certify_convergence(fig8, *hom);
    REQUIRE(cert.has_value());
    if (!cert->cone_trivial) CHECK(cert->optimum > QExp(0));
    CHECK(cert->state_cap(fig8, QExp(8)) > 0);

    // the all-plus assignment on the figure-eight closure violates
    // condition (a) at the negative crossings' columns
    SignAssignment allplus(fig8.nseg, 1);
    CHECK(!certify_convergence(fig8, allplus).has_value());

    Diagram trefoil = build_diagram(parse_braid("1 1 1"));
    SignAssignment tplus(trefoil.nseg, 1);
    CHECK(certify_convergence(trefoil, tplus).has_value());
}

TEST_CASE("inversion-data search") {
    Diagram fig8 = build_diagram(parse_braid(FIG8));
    auto found = search_inversion(fig8, 64);
    REQUIRE(!found.empty());
    auto hom = homogeneous_signs(fig8);
    REQUIRE(hom.has_value());
    bool contains_hom = false;
    for (const auto& s : found) contains_hom = contains_hom || (s == *hom);
    CHECK(contains_hom);
    for (const auto& s : found) CHECK(condition_a(fig8, s));

    // non-homogeneous fibered words must still admit inversion data
    Diagram k820 = build_diagram(parse_braid("-1 -2 -2 -2 -1 2 2 2"));
    CHECK(!homogeneous_signs(k820).has_value());
    auto f820 = search_inversion(k820, 4);
    CHECK(!f820.empty());

    Diagram k10145 = build_diagram(parse_braid("-1 -2 3 -2 -1 -3 -2 3 -2 -3 -3"));
    auto f10145 = search_inversion(k10145, 1);
    CHECK(!f10145.empty());
}

TEST_CASE("sign exponent") {
    Diagram fig8 = build_diagram(parse_braid(FIG8));
    auto hom = homogeneous_signs(fig8);
    REQUIRE(hom.has_value());
    int sdef = sign_exponent_s(fig8, *hom, SignMode::definition);
    CHECK(sdef == 1);
    int smul = sign_exponent_s(fig8, *hom, SignMode::multicycle);
    CHECK((sdef - smul) % 2 == 0);

    Diagram trefoil = build_diagram(parse_braid("1 1 1"));
    SignAssignment tplus(trefoil.nseg, 1);
    CHECK(sign_exponent_s(trefoil, tplus, SignMode::definition) == 0);
    CHECK(sign_exponent_s(trefoil, tplus, SignMode::multicycle) == 0);

    // all certified assignments of one diagram agree on the parity of s
    Diagram k820 = build_diagram(parse_braid("-1 -2 -2 -2 -1 2 2 2"));
    auto f820 = search_inversion(k820, 16);
    REQUIRE(!f820.empty());
    int parity = sign_exponent_s(k820, f820[0], SignMode::multicycle) & 1;
    for (const auto& s : f820)
        CHECK((sign_exponent_s(k820, s, SignMode::multicycle) & 1) == parity);
}

TEST_CASE("corpus file and corner codes") {
    Diagram fig8 = build_diagram(parse_braid(FIG8));
    auto hom = homogeneous_signs(fig8);
    REQUIRE(hom.has_value());
    auto codes = codes_from_signs(fig8, *hom);

    std::string path = "test_corpus_tmp.tsv";
    {
        std::ofstream out(path);
        out << "4_1\t" << FIG8 << "\t";
        for (size_t i = 0; i < codes.size(); ++i) out << (i ? "," : "") << codes[i];
        out << "\n";
        out << "3_1\t1 1 1\n";
    }
    auto corpus = load_corpus(path);
    std::remove(path.c_str());
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0].name == "4_1");
    CHECK(corpus[0].has_codes);
    CHECK(corpus[0].corner_codes == codes);
    CHECK(!corpus[1].has_codes);

    SignAssignment rebuilt = signs_from_corner_codes(fig8, codes);
    CHECK(rebuilt == *hom);

    auto bad = codes;
    bad[0] = "pmpp";  // one minus in, none out: condition (a) fails
    CHECK_THROWS(signs_from_corner_codes(fig8, bad));
}
