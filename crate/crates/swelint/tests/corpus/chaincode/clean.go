package main

import (
	"encoding/json"
	"fmt"

	"github.com/hyperledger/fabric-chaincode-go/shim"
	"github.com/hyperledger/fabric-protos-go/peer"
)

type AssetChaincode struct {
}

type Asset struct {
	ID    string `json:"id"`
	Owner string `json:"owner"`
	Value int    `json:"value"`
}

func (t *AssetChaincode) Init(stub shim.ChaincodeStubInterface) peer.Response {
	return shim.Success(nil)
}

func (t *AssetChaincode) Invoke(stub shim.ChaincodeStubInterface) peer.Response {
	fn, args := stub.GetFunctionAndParameters()
	if fn == "put" {
		if len(args) != 2 {
			return shim.Error("expected key and value")
		}
		asset := Asset{ID: args[0], Owner: args[1], Value: 0}
		payload, err := json.Marshal(asset)
		if err != nil {
			return shim.Error(fmt.Sprintf("marshal failed: %s", err))
		}
		if err := stub.PutState(args[0], payload); err != nil {
			return shim.Error(fmt.Sprintf("put failed: %s", err))
		}
		return shim.Success(nil)
	}
	return shim.Error("unknown function")
}
