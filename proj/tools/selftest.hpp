#pragma once

// Quick built-in property suite; returns the number of failed checks.
int run_selftest();
