#include <gtest/gtest.h>

#include "plg/config.hpp"
#include "plg/error.hpp"

using namespace plg;

TEST(IniConfig, SectionsCommentsAndTypes) {
    const Config c = Config::parse(R"(# comment
top = 1
[ransac]
threshold_px = 2.5   ; trailing
max_iters=500
[track]
appearance = yes
tracker = kalman
)");
    EXPECT_EQ(c.get_int("top", 0), 1);
    EXPECT_DOUBLE_EQ(c.get_double("ransac.threshold_px", 0), 2.5);
    EXPECT_EQ(c.get_int("ransac.max_iters", 0), 500);
    EXPECT_TRUE(c.get_bool("track.appearance", false));
    EXPECT_EQ(c.get_string("track.tracker", ""), "kalman");
    EXPECT_EQ(c.get_int("missing", 42), 42);
}

TEST(IniConfig, BadValuesThrow) {
    EXPECT_THROW(Config::parse("[a\nx=1"), ParseError);
    EXPECT_THROW(Config::parse("novalue"), ParseError);
    const Config c = Config::parse("n = abc\nb = maybe\n");
    EXPECT_THROW(c.get_int("n", 0), ParseError);
    EXPECT_THROW(c.get_double("n", 0), ParseError);
    EXPECT_THROW(c.get_bool("b", false), ParseError);
}

TEST(IniConfig, CanonicalFormIsOrderIndependent) {
    const Config a = Config::parse("b=2\na=1\n");
    const Config b = Config::parse("a = 1\nb = 2\n");
    EXPECT_EQ(a.canonical(), b.canonical());
    EXPECT_EQ(a.canonical(), "a=1\nb=2\n");
}
