#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "srrc/csv.hpp"
#include "srrc/errors.hpp"

using namespace srrc;

TEST_CASE("series round trip through text is exact") {
    std::mt19937_64 gen(1);
    TimeSeries s(oracle::gaussian(gen, 50, 3, 1e3));
    s.values(0, 0) = 1e-300;
    s.values(1, 1) = -0.0;
    s.values(2, 2) = 0.1;
    s.labels = {"a", "b", "c"};
    s.time = Vector::LinSpaced(50, 0.0, 4.9);
    const TimeSeries back = series_from_csv(parse_csv(series_to_csv(s)));
    CHECK((back.values.array() == s.values.array()).all());
    CHECK((back.time.array() == s.time.array()).all());
    CHECK(back.labels == s.labels);
    REQUIRE(back.dt.has_value());
    CHECK(*back.dt == s.time[1] - s.time[0]);
    CHECK(series_to_csv(back) == series_to_csv(s));
}

TEST_CASE("unlabelled series get default headers and index times") {
    TimeSeries s(Matrix::Ones(2, 2));
    const std::string text = series_to_csv(s);
    CHECK(text == "t,x1,x2\n1,1,1\n2,1,1\n");
}

TEST_CASE("the parser accepts CRLF, blank lines and padded fields") {
    const CsvTable t = parse_csv("t, a ,b\r\n\r\n1, 2.5 ,3\r\n2,4,5e-1\r\n");
    CHECK(t.header == std::vector<std::string>{"t", "a", "b"});
    CHECK(t.rows.rows() == 2);
    CHECK(t.rows(0, 1) == 2.5);
    CHECK(t.rows(1, 2) == 0.5);
}

TEST_CASE("the parser reports malformed input") {
    CHECK_THROWS_AS(parse_csv(""), IoError);
    CHECK_THROWS_AS(parse_csv("t,a\n1,2,3\n"), IoError);
    CHECK_THROWS_AS(parse_csv("t,a\n1,abc\n"), IoError);
    CHECK_THROWS_AS(parse_csv("t,a\n1,\n"), IoError);
    CHECK_THROWS_AS(parse_csv("t,a\n1,1e999\n"), IoError);
    CHECK_THROWS_AS(series_from_csv(parse_csv("t\n1\n")), IoError);
    CHECK_THROWS_AS(series_from_csv(parse_csv("t,a\n")), IoError);
    CHECK_THROWS_AS(read_csv("/nonexistent/dir/file.csv"), IoError);
}

TEST_CASE("series files round trip on disk") {
    const auto path = std::filesystem::temp_directory_path() / "srrc_csv_test.csv";
    TimeSeries s(Matrix::Identity(3, 2));
    write_series(path, s);
    const TimeSeries back = read_series(path);
    CHECK(back.values == s.values);
    std::filesystem::remove(path);
}
