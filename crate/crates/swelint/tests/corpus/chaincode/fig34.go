answer := arg[0]
// Answer
rand.Seed(seed)
sel := rand.Intn(10)

if answer == sel {
    SayGood(user, prize)
}
