// At the initial point: {key: "key", value: 0}
val := 1
// Update the value from 0 to 1
err := stub.PutState("key", val)
if err != nil {
    fmt.Printf("Error is happened. %s", err)
}
// The method returns 0, not 1
ret, err := stub.GetState("key")
if err != nil {
    fmt.Printf("Error is happened. %s", err)
}
