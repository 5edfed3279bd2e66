#pragma once

// Built-in diagnostics behind `srldpc selftest`; returns the number of failed
// checks.
int run_selftest();
