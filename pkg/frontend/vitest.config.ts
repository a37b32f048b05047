import { defineConfig } from "vitest/config";

// the differential suite shells out to the core for every case, so
// budgets are generous; tests themselves are deterministic
export default defineConfig({
    test: {
        testTimeout: 300_000,
        hookTimeout: 60_000,
    },
});
