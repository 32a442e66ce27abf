"""Regenerates corpus/desk/problems/*.json from the hand-written programs.

Hidden tests are a handful of small random cases checked against both the
exhaustive oracle and the fast solution, followed by one large case whose
answer comes from the fast solution only. Cases are ordered small to large.
"""
import json
import os
import random
import subprocess
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "desk")
PROGRAMS = os.path.join(ROOT, "programs")


def compact(v):
    return json.dumps(v, separators=(",", ":"))


def run(problem, name, text):
    spec = PROBLEMS[problem]
    path = os.path.join(PROGRAMS, problem, name + ".py")
    if spec.get("signature"):
        ns = {}
        with open(path) as f:
            exec(f.read(), ns)
        fn = getattr(ns["Solution"](), spec["signature"]["name"])
        return compact(fn(*json.loads(text))) + "\n"
    res = subprocess.run([sys.executable, path], input=text, capture_output=True,
                         text=True, check=True)
    return res.stdout


def random_cases(problem, count, seed):
    out = subprocess.run([sys.executable, os.path.join(PROGRAMS, problem, "batch_gen.py")],
                         input=f"{count} {seed} 10", capture_output=True, text=True,
                         check=True).stdout.splitlines()
    cases = []
    for line in out:
        v = json.loads(line)
        cases.append(v if isinstance(v, str) else compact(v))
    return cases


def big_case(problem, rng):
    if problem == "repair_cars":
        return compact([[rng.randint(1, 100) for _ in range(10)], 40])
    if problem == "max_subarray":
        a = [rng.randint(-10000, 10000) for _ in range(3000)]
        return f"3000\n{' '.join(map(str, a))}\n"
    if problem == "knapsack":
        rows = [f"30 10000"] + [f"{rng.randint(1, 1000)} {rng.randint(1, 1000)}" for _ in range(30)]
        return "\n".join(rows) + "\n"
    if problem == "lis":
        a = [rng.randint(-10000, 10000) for _ in range(2500)]
        return f"2500\n{' '.join(map(str, a))}\n"
    if problem == "coin_change":
        return compact([rng.sample(range(1, 60), 12), 10000])
    if problem == "longest_palindrome":
        return "".join(rng.choice("abc") for _ in range(3000)) + "\n"
    raise KeyError(problem)


PROBLEMS = {
    "repair_cars": {
        "title": "Minimum Time to Repair Cars",
        "description": (
            "You are given an integer array ranks representing the ranks of some mechanics. "
            "A mechanic with rank r can repair n cars in r * n * n minutes. You are also given "
            "an integer cars representing the total number of cars waiting in the garage to be "
            "repaired. Return the minimum time taken to repair all the cars. All the mechanics "
            "can repair the cars simultaneously."),
        "constraints": "1 <= ranks.length <= 10^5\n1 <= ranks[i] <= 100\n1 <= cars <= 10^6",
        "signature": {"name": "repairCars", "params": ["ranks", "cars"]},
        "categories": ["Greedy", "Binary Search"],
        "difficulty": "medium",
        "public": [([3], 4), ([1, 100], 2)],
    },
    "max_subarray": {
        "title": "Maximum Subarray Sum",
        "description": (
            "The first line of input contains n. The second line contains n integers a_1..a_n. "
            "Print the largest sum of a non-empty contiguous subarray."),
        "constraints": "1 <= n <= 10^5\n-10^4 <= a_i <= 10^4",
        "categories": ["Dynamic Programming"],
        "difficulty": "easy",
        "public": ["3\n1 2 3\n", "1\n-5\n"],
    },
    "knapsack": {
        "title": "0/1 Knapsack",
        "description": (
            "The first line contains n and W. Each of the next n lines contains the weight and "
            "value of one item. Each item may be taken at most once. Print the largest total "
            "value of a set of items whose total weight does not exceed W."),
        "constraints": "1 <= n <= 100\n1 <= W <= 10^4\n1 <= weight, value <= 1000",
        "categories": ["Dynamic Programming"],
        "difficulty": "medium",
        "public": ["1 5\n3 4\n", "2 10\n5 10\n4 3\n"],
    },
    "lis": {
        "title": "Longest Strictly Increasing Subsequence",
        "description": (
            "The first line contains n, the second line n integers. Print the length of the "
            "longest strictly increasing subsequence."),
        "constraints": "1 <= n <= 2500\n-10^4 <= a_i <= 10^4",
        "categories": ["Dynamic Programming", "Binary Search"],
        "difficulty": "medium",
        "public": ["4\n1 3 2 4\n", "3\n3 1 2\n"],
    },
    "coin_change": {
        "title": "Coin Change",
        "description": (
            "You are given an integer array coins representing coins of different denominations "
            "and an integer amount. Return the fewest number of coins needed to make up that "
            "amount, or -1 if the amount cannot be made up by any combination of the coins. "
            "You have an infinite number of each kind of coin."),
        "constraints": "1 <= coins.length <= 12\n1 <= coins[i] <= 2^31 - 1\n0 <= amount <= 10^4",
        "signature": {"name": "coinChange", "params": ["coins", "amount"]},
        "categories": ["Dynamic Programming"],
        "difficulty": "medium",
        "public": [([1, 2, 5], 10), ([2], 4)],
    },
    "longest_palindrome": {
        "title": "Longest Palindromic Substring Length",
        "description": (
            "The input is a single line holding a string s of lowercase letters. Print the "
            "length of the longest substring of s that reads the same forwards and backwards."),
        "constraints": "1 <= |s| <= 3000\ns consists of lowercase English letters",
        "categories": ["String", "Two Pointers"],
        "difficulty": "medium",
        "public": ["aba\n", "a\n"],
    },
}


def main():
    rng = random.Random(2024)
    for index, (pid, spec) in enumerate(PROBLEMS.items()):
        function = bool(spec.get("signature"))
        public_inputs = [compact(list(p)) if function else p for p in spec["public"]]
        public = [{"input": i, "expected_output": run(pid, "oracle", i)} for i in public_inputs]
        hidden = []
        for text in random_cases(pid, 8, 9000 + index):
            expected = run(pid, "oracle", text)
            assert expected == run(pid, "fast", text), (pid, text)
            hidden.append({"input": text, "expected_output": expected})
        hidden.sort(key=lambda c: len(c["input"]))
        big = big_case(pid, rng)
        hidden.append({"input": big, "expected_output": run(pid, "fast", big)})
        for name in ("bug_a", "bug_b"):
            assert any(run(pid, name, c["input"]) != c["expected_output"] for c in hidden), (pid, name)
        doc = {
            "id": pid,
            "title": spec["title"],
            "description": spec["description"],
            "constraints": spec["constraints"],
            "io_style": "function_call" if function else "stdin_stdout",
            "answer_policy": "exact",
            "public_tests": public,
            "categories": spec["categories"],
            "difficulty": spec["difficulty"],
            "judge": {"time_limit_ms": 1000, "hidden_tests": hidden},
        }
        if function:
            doc["signature"] = spec["signature"]
        with open(os.path.join(ROOT, "problems", pid + ".json"), "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")
        print(pid, len(hidden), "hidden tests")


if __name__ == "__main__":
    main()
