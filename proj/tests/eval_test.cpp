#include <doctest.h>

#include <sstream>

#include "scud/eval.hpp"
#include "test_support.hpp"

using namespace scud;

namespace {

OperatorVocabulary smcalflow_vocab() {
    return OperatorVocabulary::load(support::data_dir() + "/data/vocab/smcalflow.json");
}

const char* kRuthGold = "CreateEvent( AND( with_attendee( Ruth ), starts_at( NextDOW( MONDAY ) ) ) )";
const char* kRuthSwapped =
    "CreateEvent( AND( starts_at( NextDOW( MONDAY ) ), with_attendee( Ruth ) ) )";

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string f;
    while (in >> f) out.push_back(f);
    return out;
}

}  // namespace

TEST_CASE("extract_program digs the code out of model chatter") {
    auto check = [](const std::string& raw, const std::string& expected) {
        auto program = extract_program(raw);
        REQUIRE(program.has_value());
        CHECK(print_program(*program) == expected);
    };

    check("CreateEvent( Today )", "CreateEvent( Today )");
    check("```\nCreateEvent( Today )\n```", "CreateEvent( Today )");
    check("```python\nCreateEvent(Today)\n```", "CreateEvent( Today )");
    check("Sure! The code is CreateEvent( with_attendee( Ruth ) ) hope that helps",
          "CreateEvent( with_attendee( Ruth ) )");
    check("code: CreateEvent( Today ) trailing chatter", "CreateEvent( Today )");
    // the first parseable balanced span wins
    check("f( a ) then g( b )", "f( a )");
    // a broken first span does not poison later ones
    check("oops( , ) but f( a ) works", "f( a )");
    // no parentheses at all: the whole text is a leaf program
    check("Today", "Today");

    CHECK(!extract_program("").has_value());
    CHECK(!extract_program("unbalanced ( ( (").has_value());
    CHECK(!extract_program("stray ) paren").has_value());
}

TEST_CASE("exact match is literal, tree match forgives commutative order") {
    auto vocab = smcalflow_vocab();

    CHECK(exact_match(kRuthGold, kRuthGold));
    CHECK(!exact_match(kRuthSwapped, kRuthGold));
    CHECK(tree_match(kRuthSwapped, kRuthGold, vocab));
    CHECK(tree_match(kRuthGold, kRuthGold, vocab));

    // non-commutative argument order still matters
    CHECK(!tree_match("MD( 5, toMonth( January ) )", "MD( toMonth( January ), 5 )", vocab));
    // unextractable predictions match nothing
    CHECK(!exact_match("", kRuthGold));
    CHECK(!tree_match("", kRuthGold, vocab));
    // extraction applies to both sides of the string API
    CHECK(exact_match("the answer is CreateEvent( Today )", "```\nCreateEvent( Today )\n```"));
}

TEST_CASE("evaluate buckets by gold depth and counts parse failures") {
    auto vocab = smcalflow_vocab();
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"Today", "Today"},                                              // depth 1
        {"stray ) paren", "Today"},                                      // depth 1, unextractable
        {"NumberPM( 9 )", "NumberPM( 9 )"},                              // depth 2
        {"CreateEvent( has_subject( lunch ) )",
         "CreateEvent( has_subject( lunch ) )"},                         // depth 3
        {"FindEvents( with_attendee( FindManager( Jane ) ) )",
         "FindEvents( with_attendee( FindManager( Jane ) ) )"},          // depth 4
        {kRuthSwapped, kRuthGold},                                       // depth 5 -> "5+"
    };

    EvalReport report = evaluate(pairs, vocab);
    CHECK(report.n == 6);
    CHECK(report.parse_failures == 1);
    CHECK(report.exact_match == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
    CHECK(report.tree_match == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

    REQUIRE(report.by_depth.size() == 5);
    CHECK(report.by_depth.at("1").n == 2);
    CHECK(report.by_depth.at("1").exact == 1);
    CHECK(report.by_depth.at("1").tree == 1);
    CHECK(report.by_depth.at("2").n == 1);
    CHECK(report.by_depth.at("3").n == 1);
    CHECK(report.by_depth.at("4").n == 1);
    CHECK(report.by_depth.at("5+").n == 1);
    CHECK(report.by_depth.at("5+").exact == 0);
    CHECK(report.by_depth.at("5+").tree == 1);

    // per-bucket tree never trails exact
    for (const auto& [bucket, stats] : report.by_depth) CHECK(stats.tree >= stats.exact);

    // depth 6+ golds land in the same top bucket
    const std::string six =
        "CreateEvent( starts_at( OnDateAfterTime( DateTime( Date( Tomorrow ), Noon ), "
        "NumberPM( 9 ) ) ) )";
    EvalReport deep = evaluate({{six, six}}, vocab);
    CHECK(deep.by_depth.count("5+") == 1);

    EvalReport empty = evaluate({}, vocab);
    CHECK(empty.n == 0);
    CHECK(empty.exact_match == 0.0);
    CHECK(empty.tree_match == 0.0);
}

TEST_CASE("golds that do not parse are a hard error, with the pair index") {
    auto vocab = smcalflow_vocab();
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"Today", "Today"},
        {"Today", "f("},
    };
    CHECK_THROWS_WITH_AS(evaluate(pairs, vocab), doctest::Contains("pair 1"), GoldParseError);
    // golds are parsed verbatim, no extraction: trailing text is an error
    CHECK_THROWS_AS(evaluate({{"Today", "Today ) oops"}}, vocab), GoldParseError);
}

TEST_CASE("report table lays out one row per bucket plus totals") {
    auto vocab = smcalflow_vocab();
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"Today", "Today"},
        {"stray ) paren", "Today"},
        {"NumberPM( 9 )", "NumberPM( 9 )"},
        {"CreateEvent( has_subject( lunch ) )", "CreateEvent( has_subject( lunch ) )"},
        {"FindEvents( with_attendee( FindManager( Jane ) ) )",
         "FindEvents( with_attendee( FindManager( Jane ) ) )"},
        {kRuthSwapped, kRuthGold},
    };
    std::string table = report_table(evaluate(pairs, vocab));
    auto lines = split_lines(table);

    REQUIRE(lines.size() == 9);  // header, 5 buckets, all, failures, note
    CHECK(lines[0] == "depth      n   exact_match    tree_match");
    CHECK(fields(lines[1]) == std::vector<std::string>{"1", "2", "0.500", "0.500"});
    CHECK(fields(lines[2]) == std::vector<std::string>{"2", "1", "1.000", "1.000"});
    CHECK(fields(lines[3]) == std::vector<std::string>{"3", "1", "1.000", "1.000"});
    CHECK(fields(lines[4]) == std::vector<std::string>{"4", "1", "1.000", "1.000"});
    CHECK(fields(lines[5]) == std::vector<std::string>{"5+", "1", "0.000", "1.000"});
    CHECK(fields(lines[6]) == std::vector<std::string>{"all", "6", "0.667", "0.833"});
    CHECK(lines[7] == "parse failures: 1");
    CHECK(lines[8] == "tree_match is a commutativity-aware proxy for execution accuracy");
}
